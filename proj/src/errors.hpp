#pragma once

#include <stdexcept>
#include <string>

namespace seoe {

// Status codes shared with the C API (see include/seoe/seoe.h).
enum class ErrorCode : int {
    Ok = 0,
    Validation = 1,
    Parse = 2,
    Config = 3,
    Provider = 4,
    Io = 5,
    EmptyMention = 6,
    Definition = 7,
    Annotation = 8,
    Round = 9,
    Inference = 10,
    Judge = 11,
    Internal = 12,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

#define SEOE_DEFINE_ERROR(NAME, CODE)                                  \
    class NAME : public Error {                                        \
    public:                                                            \
        explicit NAME(const std::string& what) : Error(CODE, what) {}  \
    }

SEOE_DEFINE_ERROR(ValidationError, ErrorCode::Validation);
SEOE_DEFINE_ERROR(ParseError, ErrorCode::Parse);
SEOE_DEFINE_ERROR(ConfigError, ErrorCode::Config);
SEOE_DEFINE_ERROR(ProviderError, ErrorCode::Provider);
SEOE_DEFINE_ERROR(IoError, ErrorCode::Io);
SEOE_DEFINE_ERROR(EmptyMentionError, ErrorCode::EmptyMention);
SEOE_DEFINE_ERROR(DefinitionError, ErrorCode::Definition);
SEOE_DEFINE_ERROR(AnnotationError, ErrorCode::Annotation);
SEOE_DEFINE_ERROR(RoundError, ErrorCode::Round);
SEOE_DEFINE_ERROR(InferenceError, ErrorCode::Inference);
SEOE_DEFINE_ERROR(JudgeError, ErrorCode::Judge);

#undef SEOE_DEFINE_ERROR

}  // namespace seoe
