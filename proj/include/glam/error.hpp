#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glam {

// 1-based; line 0 means "no source position".
struct SourcePos {
  unsigned line = 0;
  unsigned column = 0;

  bool known() const { return line != 0; }
  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

enum class ErrorCode {
  // frontend
  LexError,
  SyntaxError,
  ArityError,
  DuplicateName,
  UnknownIdentifier,
  // type formation
  UnboundTypeVar,
  UnguardedMu,
  OpenBox,
  // typing
  TypeMismatch,
  NonConstantSubstType,
  EscapingVariable,
  CannotSynthesize,
  UnboundVariable,
  // machine
  FuelExhausted,
  Stuck,
  NotObservable,
  // denotations
  IndexZero,
  DepthExceeded,
  SemanticShape,
  // behavioural differential equations
  UnknownSymbol,
  BadVariable,
  ForwardReference,
  // io / misc
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LexError: return "LexError";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::UnboundTypeVar: return "UnboundTypeVar";
    case ErrorCode::UnguardedMu: return "UnguardedMu";
    case ErrorCode::OpenBox: return "OpenBox";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::NonConstantSubstType: return "NonConstantSubstType";
    case ErrorCode::EscapingVariable: return "EscapingVariable";
    case ErrorCode::CannotSynthesize: return "CannotSynthesize";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::FuelExhausted: return "FuelExhausted";
    case ErrorCode::Stuck: return "Stuck";
    case ErrorCode::NotObservable: return "NotObservable";
    case ErrorCode::IndexZero: return "IndexZero";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::SemanticShape: return "SemanticShape";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::BadVariable: return "BadVariable";
    case ErrorCode::ForwardReference: return "ForwardReference";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// All modules report failures through this one exception type. The code is
// stable and machine-readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, SourcePos pos = {})
      : std::runtime_error(render(code, message, pos)),
        code_(code),
        message_(std::move(message)),
        pos_(pos) {}

  ErrorCode code() const { return code_; }
  const std::string& message() const { return message_; }
  SourcePos pos() const { return pos_; }

  // error[Code] line:col: message
  static std::string render(ErrorCode code, const std::string& message, SourcePos pos) {
    std::string out = "error[";
    out += to_string(code);
    out += "]";
    if (pos.known()) {
      out += " " + std::to_string(pos.line) + ":" + std::to_string(pos.column);
    }
    out += ": " + message;
    return out;
  }

 private:
  ErrorCode code_;
  std::string message_;
  SourcePos pos_;
};

}  // namespace glam
