#include "lazard/ringio.hpp"

#include "lazard/errors.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <set>
#include <sstream>

namespace lazard {

using nlohmann::json;

namespace {

auto require_int(const json &v, const std::string &ptr) -> long long {
  if (v.is_number_integer())
    return v.get<long long>();
  if (v.is_number_unsigned()) {
    auto u = v.get<unsigned long long>();
    if (u > static_cast<unsigned long long>(std::numeric_limits<long long>::max()))
      throw SchemaError("integer out of range", ptr);
    return static_cast<long long>(u);
  }
  throw SchemaError("expected an integer", ptr);
}

void reject_unknown(const json &obj, const std::set<std::string> &allowed, const std::string &at) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw SchemaError("unknown field \"" + it.key() + "\"", at + "/" + it.key());
}

auto require_field(const json &obj, const char *key, const std::string &at) -> const json & {
  auto it = obj.find(key);
  if (it == obj.end())
    throw SchemaError(std::string("missing field \"") + key + "\"", at + "/" + key);
  return *it;
}

} // namespace

auto parse_ring_json(std::string_view text) -> LieRingData {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error &e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what(), "");
  }
  if (!doc.is_object())
    throw SchemaError("ring must be a JSON object", "");
  reject_unknown(doc, {"label", "prime", "rank", "brackets"}, "");

  std::string label;
  if (auto it = doc.find("label"); it != doc.end()) {
    if (!it->is_string())
      throw SchemaError("expected a string", "/label");
    label = it->get<std::string>();
  }
  const long long prime = require_int(require_field(doc, "prime", ""), "/prime");
  if (prime < 2 || !is_prime(static_cast<u64>(prime)))
    throw SchemaError("prime must be a prime number", "/prime");
  const long long rank = require_int(require_field(doc, "rank", ""), "/rank");
  if (rank < 1 || rank > 4096)
    throw SchemaError("rank must lie in [1, 4096]", "/rank");
  const auto &brackets = require_field(doc, "brackets", "");
  if (!brackets.is_array())
    throw SchemaError("expected an array", "/brackets");

  LieRingData data(label, static_cast<u64>(prime), static_cast<std::size_t>(rank));
  std::set<std::pair<long long, long long>> seen;
  for (std::size_t n = 0; n < brackets.size(); ++n) {
    const std::string at = "/brackets/" + std::to_string(n);
    const auto &b = brackets[n];
    if (!b.is_object())
      throw SchemaError("expected an object", at);
    reject_unknown(b, {"i", "j", "coeffs"}, at);
    const long long i = require_int(require_field(b, "i", at), at + "/i");
    const long long j = require_int(require_field(b, "j", at), at + "/j");
    if (i < 1 || i > rank)
      throw SchemaError("index out of range", at + "/i");
    if (j < 1 || j > rank)
      throw SchemaError("index out of range", at + "/j");
    if (i >= j)
      throw SchemaError("pairs must satisfy i < j", at + "/j");
    if (!seen.insert({i, j}).second)
      throw SchemaError("duplicate pair", at);
    const auto &coeffs = require_field(b, "coeffs", at);
    if (!coeffs.is_array())
      throw SchemaError("expected an array", at + "/coeffs");
    if (coeffs.size() != static_cast<std::size_t>(rank))
      throw SchemaError("coeffs must have exactly rank entries", at + "/coeffs");
    std::vector<mpz_class> c;
    for (std::size_t r = 0; r < coeffs.size(); ++r)
      c.emplace_back(std::to_string(require_int(coeffs[r], at + "/coeffs/" + std::to_string(r))));
    data.set_bracket(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1),
                     std::move(c));
  }
  return data;
}

auto ring_to_json(const LieRingData &data) -> nlohmann::ordered_json {
  nlohmann::ordered_json out;
  out["label"] = data.label();
  out["prime"] = data.prime();
  out["rank"] = data.rank();
  auto brackets = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < data.rank(); ++i)
    for (std::size_t j = i + 1; j < data.rank(); ++j) {
      const auto &c = data.stored(i, j);
      bool zero = true;
      for (const auto &v : c)
        zero = zero && v == 0;
      if (zero)
        continue;
      nlohmann::ordered_json b;
      b["i"] = i + 1;
      b["j"] = j + 1;
      auto arr = nlohmann::ordered_json::array();
      for (const auto &v : c) {
        if (!v.fits_slong_p())
          throw PreconditionViolation("structure constant does not fit the JSON integer range");
        arr.push_back(v.get_si());
      }
      b["coeffs"] = std::move(arr);
      brackets.push_back(std::move(b));
    }
  out["brackets"] = std::move(brackets);
  return out;
}

auto sha256_hex(std::string_view bytes) -> std::string {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(hex[md[k] >> 4]);
    out.push_back(hex[md[k] & 15]);
  }
  return out;
}

auto load_ring_text(std::string_view text) -> LoadedRing {
  LoadedRing r{parse_ring_json(text), "sha256:" + sha256_hex(text)};
  require_valid(r.data);
  return r;
}

auto load_ring(const std::string &path) -> LoadedRing {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw SchemaError("cannot open " + path, "");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_ring_text(ss.str());
}

} // namespace lazard
