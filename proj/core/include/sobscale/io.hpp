#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "sobscale/fredholm.hpp"
#include "sobscale/operators.hpp"
#include "sobscale/rofunc.hpp"
#include "sobscale/torus.hpp"
#include "sobscale/verify.hpp"

namespace sobscale {

/// Insertion-ordered JSON so emitted documents are byte-deterministic.
using Json = nlohmann::ordered_json;

/// Strict field checking: every key of `j` must appear in `required` or
/// `optional`, and every `required` key must be present. Violations raise
/// ConfigError naming the offending field and context.
void expect_object(const Json& j, const std::vector<std::string>& required,
                   const std::vector<std::string>& optional, const std::string& context);

/// Weight literals, e.g. {"kind":"log_power","s":1,"b1":0,"b2":0},
/// {"kind":"power_sine_log","s":0,"theta":0.3} or
/// {"kind":"tabulated","t":[...],"phi":[...],"extension_exponent":...}
/// (the exponent may be omitted on input and is then fitted).
/// Weights built from raw bounded-callable representations have no literal
/// form; serializing one raises ConfigError.
Json weight_to_json(const RoFunction& phi);
RoFunction weight_from_json(const Json& j, const std::string& context);

/// Trig polynomial literal: lexicographically sorted array of
/// {"k":[...],"re":...,"im":...} entries, exact zeros omitted.
Json poly_to_json(const TrigPoly& u);
TrigPoly poly_from_json(const Json& j, int dim, const std::string& context);

/// Vector literal {"dim":n,"components":[poly,...]}.
Json vector_to_json(const TrigVector& u);
TrigVector vector_from_json(const Json& j, const std::string& context);

/// Scalar expression literal {"terms":[{"alpha":[...],"coeff":poly},...]}.
Json scalar_op_to_json(const ScalarDiffOp& L);
ScalarDiffOp scalar_op_from_json(const Json& j, int dim, const std::string& context);

/// System literal {"p":...,"dim":...,"entries":[[entry,...],...]} row-major.
Json operator_to_json(const MatrixDiffOp& A);
MatrixDiffOp operator_from_json(const Json& j, const std::string& context);

std::string verdict_name(ExperimentVerdict v);

/// Full report document: name, parameters, verdict, constants, note and the
/// raw observations.
Json report_to_json(const ExperimentReport& rep);

/// Flat table of the observations with header "bandwidth,sample,value".
std::string report_csv(const ExperimentReport& rep);

/// Writes via a temporary file in the same directory plus an atomic rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace sobscale
