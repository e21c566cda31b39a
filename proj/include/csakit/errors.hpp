#pragma once

#include <stdexcept>
#include <string>

namespace csakit {

// Every domain error carries a short machine-parseable category which the CLI
// prints as `error: <category>: <message>`.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

#define CSAKIT_ERROR_TYPE(Name, Category)                                   \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& message) : Error(Category, message) {} \
    };

CSAKIT_ERROR_TYPE(InputNotFound, "input-not-found")
CSAKIT_ERROR_TYPE(IngestError, "ingest")
CSAKIT_ERROR_TYPE(ConfigError, "config")
CSAKIT_ERROR_TYPE(ParameterError, "parameter")
CSAKIT_ERROR_TYPE(ModelFitError, "model-fit")
CSAKIT_ERROR_TYPE(TrainingError, "training")
CSAKIT_ERROR_TYPE(MetricError, "metric")
CSAKIT_ERROR_TYPE(InputError, "input")
CSAKIT_ERROR_TYPE(UnsupportedBackend, "unsupported-backend")
CSAKIT_ERROR_TYPE(IoError, "io")
CSAKIT_ERROR_TYPE(SpecError, "spec")

#undef CSAKIT_ERROR_TYPE

}  // namespace csakit
