#include "mdd/distribution.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <omp.h>

#include "mdd/error.hpp"

namespace mdd {

namespace {

struct BuildPlan {
  std::vector<std::size_t> columns;
  std::vector<simkit::MetricKind> metrics;
  std::vector<AttributeId> ids;
};

BuildPlan plan_build(const Relation& relation,
                     std::span<const std::string> attributes,
                     const MetricMap& metrics, const LevelDomain& domain) {
  if (relation.tuple_count() < 2) {
    fail(ErrorKind::insufficient_data,
         "need at least 2 tuples to form pairs, got " +
             std::to_string(relation.tuple_count()));
  }
  if (attributes.empty()) {
    fail(ErrorKind::validation, "no attributes requested");
  }
  BuildPlan plan;
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    const auto& id = relation.attribute(attributes[i]);
    if (std::find(plan.columns.begin(), plan.columns.end(), id.index) !=
        plan.columns.end()) {
      fail(ErrorKind::validation,
           "attribute '" + attributes[i] + "' requested twice");
    }
    auto it = metrics.find(attributes[i]);
    if (it == metrics.end()) {
      fail(ErrorKind::validation,
           "no metric assigned to attribute '" + attributes[i] + "'");
    }
    plan.columns.push_back(id.index);
    plan.metrics.push_back(it->second);
    plan.ids.push_back({i, id.name});
  }
  // Records are keyed by the mixed-radix code of their level vector.
  const auto d = static_cast<unsigned __int128>(domain.d());
  unsigned __int128 space = 1;
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    space *= d;
    if (space > std::numeric_limits<std::uint64_t>::max()) {
      fail(ErrorKind::capacity,
           "d^|attributes| exceeds 2^64; reduce the attribute count or d");
    }
  }
  return plan;
}

std::vector<std::vector<simkit::Profile>> build_profiles(
    const Relation& relation, const BuildPlan& plan) {
  std::vector<std::vector<simkit::Profile>> profiles(plan.columns.size());
  for (std::size_t a = 0; a < plan.columns.size(); ++a) {
    profiles[a].reserve(relation.tuple_count());
    for (std::size_t r = 0; r < relation.tuple_count(); ++r) {
      profiles[a].emplace_back(relation.value(r, plan.columns[a]),
                               plan.metrics[a]);
    }
  }
  return profiles;
}

std::vector<std::size_t> identity(std::size_t n) {
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), 0);
  return id;
}

std::uint64_t pair_total_of(std::size_t n) {
  return static_cast<std::uint64_t>(n) * (n - 1) / 2;
}

StatDistribution decode_records(
    const BuildPlan& plan, const LevelDomain& domain,
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& keyed,
    std::uint64_t pair_total) {
  const std::size_t m = plan.columns.size();
  std::vector<Level> levels(keyed.size() * m);
  std::vector<std::uint64_t> counts;
  counts.reserve(keyed.size());
  const auto d = static_cast<std::uint64_t>(domain.d());
  for (std::size_t r = 0; r < keyed.size(); ++r) {
    std::uint64_t key = keyed[r].first;
    for (std::size_t a = m; a-- > 0;) {
      levels[r * m + a] = static_cast<Level>(key % d);
      key /= d;
    }
    counts.push_back(keyed[r].second);
  }
  return StatDistribution::from_records(plan.ids, domain, std::move(levels),
                                        std::move(counts), pair_total);
}

void finish(StatDistribution& dist, const Relation& relation,
            std::span<const std::string> attributes, const MetricMap& metrics,
            const LevelDomain& domain) {
  dist.set_provenance(metric_spec(attributes, metrics),
                      source_fingerprint(relation, attributes, metrics, domain));
}

}  // namespace

MetricMap uniform_metrics(std::span<const std::string> attributes,
                          const simkit::MetricKind& metric) {
  MetricMap out;
  for (const auto& a : attributes) out.emplace(a, metric);
  return out;
}

std::string metric_spec(std::span<const std::string> attributes,
                        const MetricMap& metrics) {
  std::vector<std::string> parts;
  for (const auto& a : attributes) {
    auto it = metrics.find(a);
    if (it == metrics.end()) {
      fail(ErrorKind::validation, "no metric assigned to attribute '" + a + "'");
    }
    parts.push_back(simkit::to_string(it->second));
  }
  if (parts.empty()) return {};
  if (std::all_of(parts.begin(), parts.end(),
                  [&](const std::string& p) { return p == parts.front(); })) {
    return parts.front();
  }
  std::string out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out += "|" + parts[i];
  return out;
}

std::uint64_t source_fingerprint(const Relation& relation,
                                 std::span<const std::string> attributes,
                                 const MetricMap& metrics,
                                 const LevelDomain& domain) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    // Length terminator keeps ("ab","c") distinct from ("a","bc").
    const auto len = static_cast<std::uint64_t>(bytes.size());
    for (int i = 0; i < 8; ++i) {
      h ^= (len >> (8 * i)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  mix("mdd-dist-v1");
  mix(std::to_string(domain.d()));
  mix(metric_spec(attributes, metrics));
  for (const auto& a : attributes) mix(a);
  for (const auto& id : relation.schema()) mix(id.name);
  for (const auto& row : relation.rows()) {
    for (const auto& v : row) mix(v);
  }
  return h;
}

StatDistribution build_distribution(const Relation& relation,
                                    std::span<const std::string> attributes,
                                    const MetricMap& metrics,
                                    const LevelDomain& domain, int threads) {
  const BuildPlan plan = plan_build(relation, attributes, metrics, domain);
  const auto profiles = build_profiles(relation, plan);
  const std::size_t n = relation.tuple_count();
  const std::size_t m = plan.columns.size();
  const auto d = static_cast<std::uint64_t>(domain.d());
  const int workers = threads > 0 ? threads : omp_get_max_threads();

  std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> partial(
      static_cast<std::size_t>(workers));

#pragma omp parallel num_threads(workers)
  {
    auto& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
    // Row i owns n-1-i pairs; dynamic scheduling balances the triangle.
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      const auto row = static_cast<std::size_t>(i);
      for (std::size_t j = row + 1; j < n; ++j) {
        std::uint64_t key = 0;
        for (std::size_t a = 0; a < m; ++a) {
          const double sim = simkit::similarity(profiles[a][row],
                                                profiles[a][j], plan.metrics[a]);
          key = key * d + simkit::discretize(sim, domain);
        }
        ++local[key];
      }
    }
  }

  // Deterministic merge: sum per key, then order by key.
  std::unordered_map<std::uint64_t, std::uint64_t> merged;
  for (const auto& local : partial) {
    for (const auto& [key, count] : local) merged[key] += count;
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> keyed(merged.begin(),
                                                             merged.end());
  std::sort(keyed.begin(), keyed.end());

  auto dist = decode_records(plan, domain, keyed, pair_total_of(n));
  dist = dist.permuted(identity(dist.size()), RecordOrder::lexicographic);
  finish(dist, relation, attributes, metrics, domain);
  return dist;
}

StatDistribution build_distribution_serial(
    const Relation& relation, std::span<const std::string> attributes,
    const MetricMap& metrics, const LevelDomain& domain) {
  const BuildPlan plan = plan_build(relation, attributes, metrics, domain);
  const std::size_t n = relation.tuple_count();
  const std::size_t m = plan.columns.size();

  std::map<std::vector<Level>, std::uint64_t> aggregated;
  std::vector<Level> levels(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t a = 0; a < m; ++a) {
        const double sim = simkit::similarity(
            relation.value(i, plan.columns[a]),
            relation.value(j, plan.columns[a]), plan.metrics[a]);
        levels[a] = simkit::discretize(sim, domain);
      }
      ++aggregated[levels];
    }
  }

  std::vector<Level> flat;
  std::vector<std::uint64_t> counts;
  for (const auto& [vec, count] : aggregated) {
    flat.insert(flat.end(), vec.begin(), vec.end());
    counts.push_back(count);
  }
  auto dist = StatDistribution::from_records(plan.ids, domain, std::move(flat),
                                             std::move(counts),
                                             pair_total_of(n));
  dist = dist.permuted(identity(dist.size()), RecordOrder::lexicographic);
  finish(dist, relation, attributes, metrics, domain);
  return dist;
}

// ------------------------------------------------------------- reorderings

GroupedDistribution group_by_rhs(const StatDistribution& dist,
                                 const ThresholdPattern& rhs) {
  std::vector<std::size_t> positions;
  std::vector<int> thresholds;
  for (const auto& e : rhs.entries()) {
    positions.push_back(dist.position_of(e.attribute));
    thresholds.push_back(e.level);
  }
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
  for (std::size_t r = 0; r < dist.size(); ++r) {
    const auto row = dist.levels(r);
    bool ok = true;
    for (std::size_t i = 0; i < positions.size() && ok; ++i) {
      ok = row[positions[i]] >= thresholds[i];
    }
    (ok ? first : second).push_back(r);
  }
  const std::size_t pivot = first.size();
  first.insert(first.end(), second.begin(), second.end());
  GroupedDistribution out{dist.permuted(first, RecordOrder::grouped), pivot};
  out.dist.mark_grouped(rhs, pivot);
  return out;
}

StatDistribution sort_by_probability_desc(const StatDistribution& dist) {
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dist.count(a) != dist.count(b)) return dist.count(a) > dist.count(b);
    const auto la = dist.levels(a);
    const auto lb = dist.levels(b);
    return std::lexicographical_compare(la.begin(), la.end(), lb.begin(),
                                        lb.end());
  });
  return dist.permuted(order, RecordOrder::by_count_desc);
}

bool is_sorted_by_probability_desc(const StatDistribution& dist) {
  for (std::size_t r = 1; r < dist.size(); ++r) {
    if (dist.count(r - 1) < dist.count(r)) return false;
  }
  return true;
}

// -------------------------------------------------------------- cache file

namespace {

constexpr std::string_view kMagic = "#mdd-dist";
constexpr std::string_view kVersion = "v1";

bool needs_escape(unsigned char c) {
  return c <= 0x20 || c == ',' || c == '%' || c == '=' || c == '|' ||
         c == 0x7F;
}

std::string escape_name(std::string_view name) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : name) {
    if (needs_escape(c)) {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::string unescape_name(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '%') {
      out.push_back(text[i]);
      continue;
    }
    if (i + 2 >= text.size()) {
      fail(ErrorKind::format, "truncated escape in attribute name");
    }
    const int hi = hex_value(text[i + 1]);
    const int lo = hex_value(text[i + 2]);
    if (hi < 0 || lo < 0) fail(ErrorKind::format, "bad escape in attribute name");
    out.push_back(static_cast<char>(hi * 16 + lo));
    i += 2;
  }
  return out;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    fail(ErrorKind::format,
         "malformed " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

void write_distribution(const StatDistribution& dist, std::ostream& out) {
  out << kMagic << ' ' << kVersion << " d=" << dist.domain().d()
      << " pairs=" << dist.pair_total() << " attrs=";
  for (std::size_t i = 0; i < dist.width(); ++i) {
    if (i) out << ',';
    out << escape_name(dist.attributes()[i].name);
  }
  char fp[17];
  std::snprintf(fp, sizeof fp, "%016llx",
                static_cast<unsigned long long>(dist.fingerprint()));
  out << " metric=" << (dist.metric_spec().empty() ? "-" : dist.metric_spec())
      << " fingerprint=" << fp << '\n';
  for (std::size_t r = 0; r < dist.size(); ++r) {
    for (Level l : dist.levels(r)) out << static_cast<int>(l) << ',';
    out << dist.count(r) << '\n';
  }
}

StatDistribution read_distribution(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) {
    fail(ErrorKind::format, "empty distribution file");
  }
  const auto fields = split(header, ' ');
  if (fields.size() != 7 || fields[0] != kMagic) {
    fail(ErrorKind::format, "not a distribution file (bad header)");
  }
  if (fields[1] != kVersion) {
    fail(ErrorKind::format, "unsupported distribution version '" +
                                std::string(fields[1]) + "', expected " +
                                std::string(kVersion));
  }
  auto value_of = [&](std::size_t i, std::string_view key) {
    const auto f = fields[i];
    if (f.substr(0, key.size()) != key || f.size() < key.size() + 1 ||
        f[key.size()] != '=') {
      fail(ErrorKind::format, "expected header field '" + std::string(key) +
                                  "=' at position " + std::to_string(i));
    }
    return f.substr(key.size() + 1);
  };
  const int d = parse_number<int>(value_of(2, "d"), "level count");
  const auto pairs = parse_number<std::uint64_t>(value_of(3, "pairs"), "pairs");
  const auto attr_text = value_of(4, "attrs");
  const auto metric_text = value_of(5, "metric");
  const auto fp_text = value_of(6, "fingerprint");
  if (fp_text.size() != 16) fail(ErrorKind::format, "fingerprint must be 16 hex digits");
  std::uint64_t fingerprint = 0;
  {
    auto [ptr, ec] = std::from_chars(fp_text.data(),
                                     fp_text.data() + fp_text.size(),
                                     fingerprint, 16);
    if (ec != std::errc{} || ptr != fp_text.data() + fp_text.size() ||
        std::any_of(fp_text.begin(), fp_text.end(),
                    [](char c) { return c >= 'A' && c <= 'F'; })) {
      fail(ErrorKind::format, "malformed fingerprint");
    }
  }

  LevelDomain domain = [&] {
    try {
      return LevelDomain(d);
    } catch (const Error& e) {
      fail(ErrorKind::format, e.what());
    }
  }();
  std::vector<AttributeId> ids;
  for (auto name : split(attr_text, ',')) {
    if (name.empty()) fail(ErrorKind::format, "empty attribute name in header");
    ids.push_back({ids.size(), unescape_name(name)});
  }
  const std::size_t m = ids.size();

  std::vector<Level> levels;
  std::vector<std::uint64_t> counts;
  std::string line;
  std::size_t line_no = 1;
  std::uint64_t sum = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cells = split(line, ',');
    if (cells.size() != m + 1) {
      fail(ErrorKind::format, "line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(m + 1) + " fields, got " +
                                  std::to_string(cells.size()));
    }
    for (std::size_t a = 0; a < m; ++a) {
      const int level = parse_number<int>(cells[a], "level");
      if (!domain.contains(level)) {
        fail(ErrorKind::format, "line " + std::to_string(line_no) + ": level " +
                                    std::to_string(level) + " outside domain");
      }
      levels.push_back(static_cast<Level>(level));
    }
    const auto count = parse_number<std::uint64_t>(cells[m], "count");
    if (count == 0) {
      fail(ErrorKind::format, "line " + std::to_string(line_no) + ": zero count");
    }
    counts.push_back(count);
    sum += count;
  }
  if (sum != pairs) {
    fail(ErrorKind::format, "checksum mismatch: counts sum to " +
                                std::to_string(sum) + " but header says pairs=" +
                                std::to_string(pairs));
  }
  const std::size_t records = counts.size();
  auto dist = StatDistribution::from_records(std::move(ids), domain,
                                             std::move(levels),
                                             std::move(counts), pairs);
  if (dist.size() != records) {
    fail(ErrorKind::format, "duplicate level vectors in distribution file");
  }
  dist.set_provenance(metric_text == "-" ? std::string{} : std::string(metric_text),
                      fingerprint);
  return dist;
}

void save_distribution(const StatDistribution& dist, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write '" + path + "'");
  write_distribution(dist, out);
  out.flush();
  if (!out) fail(ErrorKind::io, "error writing '" + path + "'");
}

StatDistribution load_distribution(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
  return read_distribution(in);
}

}  // namespace mdd
