#pragma once

// Machine-checkable verification records. Every check stores the claimed
// bound, the measured value, the slack and the relation between them, so a
// verdict can be recomputed from the record alone.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace lipfree {

using Json = nlohmann::json;

enum class Bound {
  less,           // measured < claimed (no slack)
  less_equal,     // measured <= claimed; up to claimed + tol passes with a warning
  greater,        // measured > claimed (no slack)
  greater_equal,  // measured >= claimed; down to claimed - tol passes with a warning
  equal,          // |measured - claimed| <= tol
  holds,          // boolean fact: measured is 1 when it holds, claimed is 1
};

std::string to_string(Bound b);
Bound bound_from_string(const std::string& s);

struct Check {
  std::string name;
  Bound relation = Bound::less_equal;
  double claimed = 0.0;
  double measured = 0.0;
  double tol = 0.0;
  bool pass = false;
  bool warning = false;
  std::vector<std::string> witnesses;
};

struct Verdict {
  bool pass = false;
  bool warning = false;
};
Verdict judge(Bound relation, double measured, double claimed, double tol);

class Certificate {
 public:
  Certificate() = default;
  Certificate(std::string kind, Json inputs);

  const std::string& kind() const { return kind_; }
  const Json& inputs() const { return inputs_; }
  std::uint64_t inputs_hash() const { return inputs_hash_; }
  const std::vector<Check>& checks() const { return checks_; }
  Json& payload() { return payload_; }
  const Json& payload() const { return payload_; }

  // Adds a check and returns its verdict.
  bool add(std::string name, Bound relation, double measured, double claimed, double tol = 0.0,
           std::vector<std::string> witnesses = {});
  bool add_fact(std::string name, bool holds, std::vector<std::string> witnesses = {});
  // Appends every check of `other`, prefixing names with `prefix`.
  void absorb(const Certificate& other, const std::string& prefix);

  bool passed() const;
  bool has_warnings() const;
  const Check* find(const std::string& name) const;
  // First failing check, or nullptr.
  const Check* first_failure() const;

  Json to_json() const;
  static Certificate from_json(const Json& j);

 private:
  std::string kind_;
  Json inputs_ = Json::object();
  std::uint64_t inputs_hash_ = 0;
  std::vector<Check> checks_;
  Json payload_ = Json::object();
};

// FNV-1a over the compact dump of `j`; object keys are sorted by the
// serializer, so equal values hash equally.
std::uint64_t fnv1a_hash(const Json& j);
std::string hash_hex(std::uint64_t h);

// JSON numbers cannot hold infinities or NaN; these map them to strings.
Json number_to_json(double v);
double number_from_json(const Json& j);

struct Reverification {
  bool pass = false;
  std::vector<std::string> problems;
};
// Re-derives every verdict from the stored numbers and compares the stored
// hash with the stored inputs. Does not re-measure anything.
Reverification recheck(const Json& certificate_json);

}  // namespace lipfree
