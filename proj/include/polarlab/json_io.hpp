#pragma once

#include "polarlab/channels.hpp"
#include "polarlab/entropy.hpp"
#include "polarlab/fqlin.hpp"
#include "polarlab/kernelscope.hpp"

#include <json.hpp>

namespace polarlab {

using Json = nlohmann::ordered_json;

/// {"q": int, "rows": int, "cols": int, "entries": [int, ...]} row-major.
Json to_json(const Matrix &m);
Matrix matrix_from_json(const Json &j);

/// {"kind": "qsc"|"erasure", "q": int, "param": real} or {"kind": "table", "q": int, "w": [[...]]}.
Json to_json(const Channel &c);
Channel channel_from_json(const Json &j);

Json to_json(const CodeDistance &d);
Json to_json(const ContainmentWitness &w);
Json to_json(const KernelReport &r);

/// {"h": [...], "sum": real, "per_index_exponents": [...]}; exponents may be empty.
Json profile_json(const EntropyProfile &p, const std::vector<double> &exponents = {});

} // namespace polarlab
