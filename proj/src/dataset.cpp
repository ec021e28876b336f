#include "wide/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "wide/error.hpp"
#include "wide/random.hpp"

namespace wide {

namespace fs = std::filesystem;
using json = nlohmann::json;

DatasetManifest read_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw LoadError(manifest_path.string(), "file not readable");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError(manifest_path.string(), e.what());
  }

  DatasetManifest manifest;
  try {
    const auto format = doc.at("format").get<std::string>();
    if (format == "csv_column") {
      manifest.format = SignalFormat::csv_column;
    } else if (format == "wav") {
      manifest.format = SignalFormat::wav;
    } else {
      throw ValidationError("manifest format must be 'csv_column' or 'wav', got '" + format + "'");
    }
    manifest.class_names = doc.at("class_names").get<std::vector<std::string>>();
    if (doc.contains("sample_rate_hz")) manifest.sample_rate_hz = doc["sample_rate_hz"].get<double>();

    const fs::path base = manifest_path.parent_path();
    for (const auto& r : doc.at("records")) {
      ManifestEntry entry;
      fs::path p = r.at("path").get<std::string>();
      entry.path = p.is_absolute() ? p : base / p;
      entry.label = r.at("label").get<int>();
      if (r.contains("id")) entry.id = r["id"].get<std::string>();
      if (r.contains("sample_rate_hz")) entry.sample_rate_hz = r["sample_rate_hz"].get<double>();
      manifest.records.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw ValidationError("malformed manifest '" + manifest_path.string() + "': " + e.what());
  }
  return manifest;
}

void validate_record(const SignalRecord& record) {
  if (record.samples.size() < kMinSignalLength) {
    throw ValidationError("record '" + record.id + "' has " + std::to_string(record.samples.size()) +
                          " samples; at least " + std::to_string(kMinSignalLength) + " required");
  }
  if (!(record.sample_rate_hz > 0.0) || !std::isfinite(record.sample_rate_hz)) {
    throw ValidationError("record '" + record.id + "' has a non-positive sample rate");
  }
  for (std::size_t i = 0; i < record.samples.size(); ++i) {
    if (!std::isfinite(record.samples[i])) {
      throw ValidationError("record '" + record.id + "' has a non-finite sample at index " +
                            std::to_string(i));
    }
  }
  if (record.label < 0) throw ValidationError("record '" + record.id + "' has a negative label");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

std::vector<double> read_csv_column(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string(), "file not readable");
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view field = line;
    if (const auto comma = field.find(','); comma != std::string_view::npos) field = field.substr(0, comma);
    if (trim(field).empty()) continue;
    const auto v = parse_double(field);
    if (!v) {
      if (values.empty() && line_no == 1) continue;  // header
      throw LoadError(path.string(), "non-numeric value on line " + std::to_string(line_no));
    }
    values.push_back(*v);
  }
  return values;
}

namespace {

std::uint32_t le32(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}
std::uint16_t le16(const unsigned char* p) { return std::uint16_t(p[0] | (p[1] << 8)); }

}  // namespace

WavData read_wav(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string(), "file not readable");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw LoadError(path.string(), "not a RIFF/WAVE file");
  }

  WavData wav;
  int format_tag = 0;
  int block_align = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw LoadError(path.string(), "truncated fmt chunk");
      const unsigned char* f = bytes.data() + body;
      format_tag = le16(f);
      wav.channels = le16(f + 2);
      wav.sample_rate_hz = le32(f + 4);
      block_align = le16(f + 12);
      wav.bits_per_sample = le16(f + 14);
      if (format_tag == 0xFFFE && avail >= 26) format_tag = le16(f + 24);  // extensible subformat
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = avail;
    }
    pos = body + size + (size & 1u);
  }

  if (!have_fmt) throw LoadError(path.string(), "missing fmt chunk");
  if (!data) throw LoadError(path.string(), "missing data chunk");
  if (format_tag != 1) throw LoadError(path.string(), "only integer PCM is supported");
  const int bytes_per_sample = wav.bits_per_sample / 8;
  if (wav.channels < 1 || bytes_per_sample < 1 || bytes_per_sample > 4 || wav.bits_per_sample % 8 != 0 ||
      block_align < wav.channels * bytes_per_sample) {
    throw LoadError(path.string(), "unsupported PCM layout");
  }

  const std::size_t frames = data_size / static_cast<std::size_t>(block_align);
  const double scale = std::ldexp(1.0, wav.bits_per_sample - 1);
  wav.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const unsigned char* s = data + i * block_align;
    std::int64_t v = 0;
    if (bytes_per_sample == 1) {
      v = static_cast<std::int64_t>(s[0]) - 128;  // 8-bit PCM is unsigned
    } else {
      std::uint32_t u = 0;
      for (int b = 0; b < bytes_per_sample; ++b) u |= std::uint32_t(s[b]) << (8 * b);
      const int shift = 32 - wav.bits_per_sample;
      v = static_cast<std::int32_t>(u << shift) >> shift;
    }
    wav.samples[i] = static_cast<double>(v) / scale;
  }
  return wav;
}

std::vector<SignalRecord> load_dataset(const DatasetManifest& manifest) {
  if (manifest.records.empty()) throw ValidationError("manifest lists no records");
  std::set<int> labels;
  for (const auto& e : manifest.records) labels.insert(e.label);
  if (labels.size() < 2) throw ValidationError("manifest must contain at least 2 distinct labels");
  if (!manifest.class_names.empty()) {
    for (const auto& e : manifest.records) {
      if (e.label < 0 || static_cast<std::size_t>(e.label) >= manifest.class_names.size()) {
        throw ValidationError("record '" + e.path.string() + "' has label " + std::to_string(e.label) +
                              " outside class_names");
      }
    }
  }

  std::vector<SignalRecord> records;
  records.reserve(manifest.records.size());
  for (const auto& e : manifest.records) {
    SignalRecord r;
    r.id = e.id.value_or(e.path.stem().string());
    r.label = e.label;
    if (!fs::exists(e.path)) throw LoadError(e.path.string(), "file does not exist");
    if (manifest.format == SignalFormat::wav) {
      auto wav = read_wav(e.path);
      r.samples = std::move(wav.samples);
      r.sample_rate_hz = e.sample_rate_hz.value_or(wav.sample_rate_hz);
    } else {
      r.samples = read_csv_column(e.path);
      const auto rate = e.sample_rate_hz ? e.sample_rate_hz : manifest.sample_rate_hz;
      if (!rate) throw ValidationError("record '" + r.id + "' has no sample_rate_hz (CSV needs one)");
      r.sample_rate_hz = *rate;
    }
    validate_record(r);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<int> labels_of(std::span<const SignalRecord> records) {
  std::vector<int> labels;
  labels.reserve(records.size());
  for (const auto& r : records) labels.push_back(r.label);
  return labels;
}

FoldPlan make_folds(std::span<const int> labels, int p, std::uint64_t seed) {
  if (p < 5 || p > 10) throw ConfigError("fold count p must be in [5, 10], got " + std::to_string(p));
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  for (const auto& [label, idx] : members) {
    if (idx.size() < static_cast<std::size_t>(p)) {
      throw ConfigError("class " + std::to_string(label) + " has " + std::to_string(idx.size()) +
                        " records, fewer than p = " + std::to_string(p));
    }
  }

  FoldPlan plan{p, seed, std::vector<int>(labels.size(), 0)};
  Rng rng(seed);
  std::size_t offset = 0;
  for (auto& [label, idx] : members) {
    rng.shuffle(std::span(idx));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      plan.assignments[idx[j]] = static_cast<int>((offset + j) % static_cast<std::size_t>(p));
    }
    offset += idx.size();
  }
  return plan;
}

FoldPlan make_folds(std::span<const SignalRecord> records, int p, std::uint64_t seed) {
  const auto labels = labels_of(records);
  return make_folds(std::span<const int>(labels), p, seed);
}

FoldRoles fold_roles(const FoldPlan& plan, int test_fold) {
  if (test_fold < 0 || test_fold >= plan.p) {
    throw ArgumentError("test_fold " + std::to_string(test_fold) + " outside [0, " + std::to_string(plan.p) + ")");
  }
  const int eval_fold = (test_fold + 1) % plan.p;
  FoldRoles roles;
  for (std::size_t i = 0; i < plan.assignments.size(); ++i) {
    const int f = plan.assignments[i];
    if (f == test_fold) {
      roles.test.push_back(i);
    } else if (f == eval_fold) {
      roles.eval.push_back(i);
    } else {
      roles.train.push_back(i);
    }
  }
  return roles;
}

std::vector<FoldRoles> rotating_roles(const FoldPlan& plan) {
  std::vector<FoldRoles> all;
  for (int f = 0; f < plan.p; ++f) all.push_back(fold_roles(plan, f));
  return all;
}

std::vector<FoldRoles> hidden_test_roles(const FoldPlan& plan, int hidden_fold) {
  if (hidden_fold < 0 || hidden_fold >= plan.p) {
    throw ArgumentError("hidden_fold " + std::to_string(hidden_fold) + " outside [0, " + std::to_string(plan.p) +
                        ")");
  }
  std::vector<FoldRoles> all;
  for (int e = 0; e < plan.p; ++e) {
    if (e == hidden_fold) continue;
    FoldRoles roles;
    for (std::size_t i = 0; i < plan.assignments.size(); ++i) {
      const int f = plan.assignments[i];
      if (f == hidden_fold) {
        roles.test.push_back(i);
      } else if (f == e) {
        roles.eval.push_back(i);
      } else {
        roles.train.push_back(i);
      }
    }
    all.push_back(std::move(roles));
  }
  return all;
}

}  // namespace wide
