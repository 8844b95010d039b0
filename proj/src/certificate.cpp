#include "lipfree/certificate.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "lipfree/matrix.hpp"

namespace lipfree {

std::string to_string(Bound b) {
  switch (b) {
    case Bound::less: return "<";
    case Bound::less_equal: return "<=";
    case Bound::greater: return ">";
    case Bound::greater_equal: return ">=";
    case Bound::equal: return "==";
    case Bound::holds: return "holds";
  }
  return "?";
}

Bound bound_from_string(const std::string& s) {
  for (Bound b : {Bound::less, Bound::less_equal, Bound::greater, Bound::greater_equal, Bound::equal, Bound::holds}) {
    if (to_string(b) == s) return b;
  }
  throw Error("unknown check relation '" + s + "'");
}

Verdict judge(Bound relation, double measured, double claimed, double tol) {
  if (std::isnan(measured) || std::isnan(claimed)) return {false, false};
  switch (relation) {
    case Bound::less: return {measured < claimed, false};
    case Bound::greater: return {measured > claimed, false};
    case Bound::less_equal:
      if (measured <= claimed) return {true, false};
      return {measured <= claimed + tol, measured <= claimed + tol};
    case Bound::greater_equal:
      if (measured >= claimed) return {true, false};
      return {measured >= claimed - tol, measured >= claimed - tol};
    case Bound::equal: return {std::abs(measured - claimed) <= tol, false};
    case Bound::holds: return {measured == 1.0 && claimed == 1.0, false};
  }
  return {false, false};
}

Certificate::Certificate(std::string kind, Json inputs)
    : kind_(std::move(kind)), inputs_(std::move(inputs)), inputs_hash_(fnv1a_hash(inputs_)) {}

bool Certificate::add(std::string name, Bound relation, double measured, double claimed, double tol,
                      std::vector<std::string> witnesses) {
  const auto v = judge(relation, measured, claimed, tol);
  checks_.push_back(Check{std::move(name), relation, claimed, measured, tol, v.pass, v.warning,
                          v.pass ? std::vector<std::string>{} : std::move(witnesses)});
  return v.pass;
}

bool Certificate::add_fact(std::string name, bool holds, std::vector<std::string> witnesses) {
  return add(std::move(name), Bound::holds, holds ? 1.0 : 0.0, 1.0, 0.0, std::move(witnesses));
}

void Certificate::absorb(const Certificate& other, const std::string& prefix) {
  for (auto c : other.checks_) {
    c.name = prefix + c.name;
    checks_.push_back(std::move(c));
  }
}

bool Certificate::passed() const {
  if (checks_.empty()) return false;
  for (const auto& c : checks_) {
    if (!c.pass) return false;
  }
  return true;
}

bool Certificate::has_warnings() const {
  for (const auto& c : checks_) {
    if (c.warning) return true;
  }
  return false;
}

const Check* Certificate::find(const std::string& name) const {
  for (const auto& c : checks_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const Check* Certificate::first_failure() const {
  for (const auto& c : checks_) {
    if (!c.pass) return &c;
  }
  return nullptr;
}

Json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error("expected a number, got " + j.dump());
}

Json Certificate::to_json() const {
  Json checks = Json::array();
  for (const auto& c : checks_) {
    checks.push_back({{"name", c.name},
                      {"relation", to_string(c.relation)},
                      {"claimed", number_to_json(c.claimed)},
                      {"measured", number_to_json(c.measured)},
                      {"tol", number_to_json(c.tol)},
                      {"pass", c.pass},
                      {"warning", c.warning},
                      {"witnesses", c.witnesses}});
  }
  return {{"kind", kind_},
          {"pass", passed()},
          {"inputs", inputs_},
          {"inputs_hash", hash_hex(inputs_hash_)},
          {"checks", std::move(checks)},
          {"payload", payload_}};
}

Certificate Certificate::from_json(const Json& j) {
  Certificate c;
  c.kind_ = j.at("kind").get<std::string>();
  c.inputs_ = j.value("inputs", Json::object());
  c.inputs_hash_ = std::stoull(j.at("inputs_hash").get<std::string>(), nullptr, 16);
  c.payload_ = j.value("payload", Json::object());
  for (const auto& k : j.at("checks")) {
    Check ch;
    ch.name = k.at("name").get<std::string>();
    ch.relation = bound_from_string(k.at("relation").get<std::string>());
    ch.claimed = number_from_json(k.at("claimed"));
    ch.measured = number_from_json(k.at("measured"));
    ch.tol = number_from_json(k.at("tol"));
    ch.pass = k.at("pass").get<bool>();
    ch.warning = k.value("warning", false);
    ch.witnesses = k.value("witnesses", std::vector<std::string>{});
    c.checks_.push_back(std::move(ch));
  }
  return c;
}

std::uint64_t fnv1a_hash(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Reverification recheck(const Json& certificate_json) {
  Reverification r;
  Certificate c;
  try {
    c = Certificate::from_json(certificate_json);
  } catch (const std::exception& ex) {
    r.problems.push_back(std::string("malformed certificate: ") + ex.what());
    return r;
  }
  if (fnv1a_hash(c.inputs()) != c.inputs_hash()) r.problems.push_back("inputs_hash does not match inputs");
  if (c.checks().empty()) r.problems.push_back("certificate has no checks");
  for (const auto& ch : c.checks()) {
    const auto v = judge(ch.relation, ch.measured, ch.claimed, ch.tol);
    if (v.pass != ch.pass) {
      r.problems.push_back("check '" + ch.name + "': stored verdict disagrees with its numbers");
    } else if (!v.pass) {
      r.problems.push_back("check '" + ch.name + "' fails: measured " + std::to_string(ch.measured) + " " +
                           to_string(ch.relation) + " " + std::to_string(ch.claimed));
    }
  }
  if (certificate_json.contains("pass") && certificate_json.at("pass").get<bool>() != c.passed()) {
    r.problems.push_back("top-level pass flag disagrees with the checks");
  }
  r.pass = r.problems.empty();
  return r;
}

}  // namespace lipfree
