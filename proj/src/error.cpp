#include "mutabench/error.hpp"

namespace mutabench {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::FileNotFound: return "file-not-found";
        case ErrorKind::MalformedRecord: return "malformed-record";
        case ErrorKind::EmptyCorpus: return "empty-corpus";
        case ErrorKind::ParseError: return "parse-error";
        case ErrorKind::SampleCountMismatch: return "sample-count-mismatch";
        case ErrorKind::EmptyInput: return "empty-input";
        case ErrorKind::MixedK: return "mixed-k";
        case ErrorKind::TransportError: return "transport-error";
        case ErrorKind::AuthError: return "auth-error";
        case ErrorKind::BudgetExhausted: return "budget-exhausted";
        case ErrorKind::SandboxSetup: return "sandbox-setup-error";
        case ErrorKind::Usage: return "usage-error";
        case ErrorKind::GateFailed: return "gate-failed";
    }
    return "error";
}

}  // namespace mutabench
