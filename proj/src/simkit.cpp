#include "mdd/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mdd/error.hpp"

namespace mdd::simkit {

MetricKind MetricKind::cosine_qgram(int q) {
  if (q < 1) fail(ErrorKind::validation, "q-gram length must be >= 1");
  return {Type::cosine_qgram, q};
}

MetricKind parse_metric(std::string_view text, int default_q) {
  if (text == "cosine-word") return MetricKind::cosine_word();
  if (text == "edit") return MetricKind::edit();
  if (text == "cosine-qgram") return MetricKind::cosine_qgram(default_q);
  constexpr std::string_view prefix = "cosine-qgram:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string digits(text.substr(prefix.size()));
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(),
                     [](char c) { return c >= '0' && c <= '9'; }) ||
        digits.size() > 6) {
      fail(ErrorKind::validation, "bad q in metric '" + std::string(text) + "'");
    }
    return MetricKind::cosine_qgram(std::stoi(digits));
  }
  fail(ErrorKind::validation,
       "unknown metric '" + std::string(text) +
           "' (expected cosine-word | cosine-qgram:<q> | edit)");
}

std::string to_string(const MetricKind& metric) {
  switch (metric.type) {
    case MetricKind::Type::cosine_word: return "cosine-word";
    case MetricKind::Type::cosine_qgram:
      return "cosine-qgram:" + std::to_string(metric.q);
    case MetricKind::Type::edit: return "edit";
  }
  return "?";
}

std::u32string decode_lower(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* p = reinterpret_cast<const unsigned char*>(utf8.data());
  const auto* end = p + utf8.size();
  while (p < end) {
    char32_t cp;
    int extra;
    const unsigned char b = *p;
    if (b < 0x80) {
      cp = b;
      extra = 0;
    } else if ((b & 0xE0) == 0xC0) {
      cp = b & 0x1F;
      extra = 1;
    } else if ((b & 0xF0) == 0xE0) {
      cp = b & 0x0F;
      extra = 2;
    } else if ((b & 0xF8) == 0xF0) {
      cp = b & 0x07;
      extra = 3;
    } else {
      out.push_back(U'�');
      ++p;
      continue;
    }
    if (end - p <= extra) {
      out.push_back(U'�');
      break;
    }
    bool ok = true;
    for (int i = 1; i <= extra; ++i) {
      if ((p[i] & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (p[i] & 0x3F);
    }
    if (!ok) {
      out.push_back(U'�');
      ++p;
      continue;
    }
    p += extra + 1;
    if (cp >= U'A' && cp <= U'Z') cp += U'a' - U'A';
    out.push_back(cp);
  }
  return out;
}

namespace {

// Non-ASCII scalar values count as word characters.
bool is_word_char(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'0' && c <= U'9') ||
         (c >= U'A' && c <= U'Z') || c >= 0x80;
}

std::vector<std::u32string> tokenize(const std::u32string& text,
                                     const MetricKind& metric) {
  std::vector<std::u32string> tokens;
  if (metric.type == MetricKind::Type::cosine_word) {
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && !is_word_char(text[i])) ++i;
      const std::size_t start = i;
      while (i < text.size() && is_word_char(text[i])) ++i;
      if (i > start) tokens.push_back(text.substr(start, i - start));
    }
  } else {
    const auto q = static_cast<std::size_t>(metric.q);
    for (std::size_t i = 0; i + q <= text.size(); ++i) {
      tokens.push_back(text.substr(i, q));
    }
  }
  return tokens;
}

double edit_similarity(std::u32string_view a, std::u32string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  const auto dist = levenshtein(a, b);
  return 1.0 - static_cast<double>(dist) / static_cast<double>(longest);
}

}  // namespace

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

Profile::Profile(std::string_view value, const MetricKind& metric)
    : text_(decode_lower(value)) {
  if (metric.type == MetricKind::Type::edit) return;
  std::map<std::u32string, std::uint32_t> counts;
  for (auto& t : tokenize(text_, metric)) ++counts[std::move(t)];
  bag_.assign(counts.begin(), counts.end());
  for (const auto& [token, m] : bag_) {
    sum_squares_ += static_cast<std::uint64_t>(m) * m;
  }
}

double similarity(const Profile& a, const Profile& b, const MetricKind& metric) {
  if (metric.type == MetricKind::Type::edit) {
    return edit_similarity(a.text_, b.text_);
  }
  if (a.bag_.empty() || b.bag_.empty()) {
    return a.text_ == b.text_ ? 1.0 : 0.0;
  }
  std::uint64_t dot = 0;
  auto i = a.bag_.begin();
  auto j = b.bag_.begin();
  while (i != a.bag_.end() && j != b.bag_.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      dot += static_cast<std::uint64_t>(i->second) * j->second;
      ++i;
      ++j;
    }
  }
  const double denom = std::sqrt(static_cast<double>(a.sum_squares_) *
                                 static_cast<double>(b.sum_squares_));
  return std::min(1.0, static_cast<double>(dot) / denom);
}

double similarity(std::string_view a, std::string_view b,
                  const MetricKind& metric) {
  return similarity(Profile(a, metric), Profile(b, metric), metric);
}

Level discretize(double sim, const LevelDomain& domain) {
  if (!(sim >= 0.0 && sim <= 1.0)) {
    fail(ErrorKind::domain,
         "similarity " + std::to_string(sim) + " outside [0, 1]");
  }
  const double scaled = sim * static_cast<double>(domain.d() - 1);
  const auto level = static_cast<int>(std::floor(scaled + 0.5));
  return static_cast<Level>(std::min(level, domain.d() - 1));
}

}  // namespace mdd::simkit
