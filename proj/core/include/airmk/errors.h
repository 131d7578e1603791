/*
 * Copyright 2026 The airmk Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef AIRMK_ERRORS_H_
#define AIRMK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace airmk {

// Base class of every error raised by the library. Callers that only care
// about "some module failed" catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter is outside its documented range. The message names the
// violated constraint.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Operands built under different RingParams were combined.
class ParamMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

// |Lambda * x / mu| >= q/4: the encoded scalar would eat the decryption
// margin.
class EncodeOverflow : public Error {
 public:
  using Error::Error;
};

// Digital reconstruction left a non-message coefficient at or beyond q/4.
class DecryptionMargin : public Error {
 public:
  using Error::Error;
};

// A scaled analog coefficient reached q * 2^(sF) / 2 before the centered
// reduction, so the decode wrapped around.
class Wraparound : public Error {
 public:
  using Error::Error;
};

// Fixed-point scale mismatch or overflow between analog vectors.
class ScaleError : public Error {
 public:
  using Error::Error;
};

// A closed-form quantity was requested outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Missing or malformed input files.
class DataError : public Error {
 public:
  using Error::Error;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

}  // namespace airmk

#endif  // AIRMK_ERRORS_H_
