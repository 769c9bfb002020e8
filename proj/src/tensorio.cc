#include "goss/tensorio.h"

#include <png.h>

#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"

namespace goss {
namespace {

using FilePtr = std::unique_ptr<std::FILE, decltype(&std::fclose)>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode), &std::fclose);
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

[[noreturn]] void png_error_handler(png_structp png, png_const_charp message) {
  auto* buffer = static_cast<std::string*>(png_get_error_ptr(png));
  if (buffer) *buffer = message;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

std::uint32_t load_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

constexpr std::size_t kHeaderBytes = 20;
constexpr std::uint32_t kSoftmaxFlag = 1u;

}  // namespace

LabelImage read_label_map(const std::filesystem::path& path, const LabelReadOptions& options) {
  FilePtr file = open_file(path, "rb");
  std::string error;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
  if (!png) throw IoError("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng initialisation failed");
  }

  // Everything the longjmp may skip lives outside this frame's automatics.
  std::vector<std::uint8_t> raw;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": " + (error.empty() ? "invalid PNG" : error));
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  png_get_IHDR(png, info, &width, &height, &bit_depth, &color_type, nullptr, nullptr, nullptr);
  const bool gray = color_type == PNG_COLOR_TYPE_GRAY;
  const bool depth_ok = bit_depth == 8 || bit_depth == 16;
  if (gray && depth_ok) {
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    raw.resize(row_bytes * height);
    rows.resize(height);
    for (png_uint_32 r = 0; r < height; ++r) rows[r] = raw.data() + r * row_bytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);

  if (!gray) throw FormatError(path.string() + ": label maps must be single-channel grayscale PNGs");
  if (!depth_ok) throw FormatError(path.string() + ": label maps must be 8- or 16-bit");
  if (width > static_cast<png_uint_32>(std::numeric_limits<int>::max()) ||
      height > static_cast<png_uint_32>(std::numeric_limits<int>::max())) {
    throw FormatError(path.string() + ": image too large");
  }

  LabelImage out(static_cast<int>(height), static_cast<int>(width), 0);
  const std::size_t n = out.size();
  if (bit_depth == 16) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = static_cast<LabelId>((raw[2 * i] << 8) | raw[2 * i + 1]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = (options.void_255_in_8bit && raw[i] == 255) ? kVoid : raw[i];
    }
  }
  return out;
}

SemanticMap read_semantic_map(const std::filesystem::path& path, int num_known,
                              const LabelReadOptions& options) {
  try {
    return SemanticMap(num_known, read_label_map(path, options));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

ClusterMap read_cluster_map(const std::filesystem::path& path, const LabelReadOptions& options) {
  return read_label_map(path, options);
}

void write_label_map(const Grid<LabelId>& map, const std::filesystem::path& path) {
  std::vector<std::uint8_t> raw(map.size() * 2);
  for (std::size_t i = 0; i < map.size(); ++i) {
    raw[2 * i] = static_cast<std::uint8_t>(map[i] >> 8);
    raw[2 * i + 1] = static_cast<std::uint8_t>(map[i] & 0xff);
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(map.height()));
  const std::size_t row_bytes = static_cast<std::size_t>(map.width()) * 2;
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = raw.data() + r * row_bytes;

  FilePtr file = open_file(path, "wb");
  std::string error;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
  if (!png) throw IoError("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(path.string() + ": " + (error.empty() ? "PNG write failed" : error));
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(map.width()),
               static_cast<png_uint_32>(map.height()), 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw IoError("failed to write " + path.string());
}

std::vector<std::uint8_t> encode_score_volume(const ScoreVolume& vol) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + vol.data().size() * 4);
  for (char c : std::string_view("GSV1")) out.push_back(static_cast<std::uint8_t>(c));
  store_u32(out, static_cast<std::uint32_t>(vol.channels()));
  store_u32(out, static_cast<std::uint32_t>(vol.height()));
  store_u32(out, static_cast<std::uint32_t>(vol.width()));
  store_u32(out, vol.softmax() ? kSoftmaxFlag : 0u);
  for (float v : vol.data()) store_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

ScoreVolume decode_score_volume(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderBytes) throw FormatError("GSV1 header truncated");
  if (std::memcmp(bytes.data(), "GSV1", 4) != 0) throw FormatError("bad GSV1 magic");
  const std::uint32_t channels = load_u32(bytes.data() + 4);
  const std::uint32_t height = load_u32(bytes.data() + 8);
  const std::uint32_t width = load_u32(bytes.data() + 12);
  const std::uint32_t flags = load_u32(bytes.data() + 16);
  if (flags & ~kSoftmaxFlag) throw FormatError("GSV1 reserved flag bits set");
  constexpr auto kMaxDim = static_cast<std::uint32_t>(std::numeric_limits<int>::max());
  if (channels == 0 || height == 0 || width == 0 || channels > kMaxDim || height > kMaxDim ||
      width > kMaxDim) {
    throw FormatError("GSV1 dimensions out of range");
  }
  const unsigned __int128 count = static_cast<unsigned __int128>(channels) * height * width;
  const unsigned __int128 payload = count * 4;
  if (payload > std::numeric_limits<std::size_t>::max() - kHeaderBytes) {
    throw FormatError("GSV1 dimensions overflow");
  }
  const auto expected = static_cast<std::size_t>(payload) + kHeaderBytes;
  if (bytes.size() < expected) throw FormatError("GSV1 payload truncated");
  if (bytes.size() > expected) throw FormatError("GSV1 payload has trailing bytes");
  std::vector<float> data(static_cast<std::size_t>(count));
  const std::uint8_t* p = bytes.data() + kHeaderBytes;
  for (std::size_t i = 0; i < data.size(); ++i, p += 4) data[i] = std::bit_cast<float>(load_u32(p));
  return ScoreVolume(static_cast<int>(channels), static_cast<int>(height), static_cast<int>(width),
                     std::move(data), (flags & kSoftmaxFlag) != 0);
}

ScoreVolume read_score_volume(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed to read " + path.string());
  try {
    return decode_score_volume(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_score_volume(const ScoreVolume& vol, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_score_volume(vol);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed to write " + path.string());
}

ScoreVolume anomaly_to_volume(const AnomalyMap& anomaly) {
  return ScoreVolume(1, anomaly.height(), anomaly.width(), anomaly.data(), false);
}

AnomalyMap volume_to_anomaly(const ScoreVolume& vol) {
  if (vol.channels() != 1) {
    throw ValidationError("anomaly volumes must have one channel, got " +
                          std::to_string(vol.channels()));
  }
  return AnomalyMap(vol.height(), vol.width(), vol.data());
}

IdentifyMethod RunConfig::identify_method() const {
  IdentifyMethod m;
  m.kind = method;
  m.beta_uk = beta_uk;
  m.tau = method == IdentifyKind::kMsp ? std::optional<double>(effective_tau()) : tau;
  return m;
}

void RunConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("lambda must lie in [0,1], got " + std::to_string(lambda));
  }
  if (connectivity != 4 && connectivity != 8) {
    throw ValidationError("connectivity must be 4 or 8, got " + std::to_string(connectivity));
  }
  if (min_segment_area < 0) throw ValidationError("min_segment_area must be non-negative");
  if (workers < 1) throw ValidationError("workers must be at least 1");
  if (num_known) validate_num_known(*num_known);
  if (tau && !std::isfinite(*tau)) throw ValidationError("tau must be finite");
  if (!(beta_uk > 1.0) || !std::isfinite(beta_uk)) {
    throw ValidationError("beta_uk must be a finite value > 1");
  }
  identify_method().validate();
}

RunConfig parse_run_config(std::string_view json_text, bool validate) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");

  RunConfig cfg;
  static const std::set<std::string> kKeys = {
      "tau",       "beta_uk",  "lambda",   "connectivity", "min_segment_area", "method",
      "strict_n",  "fallback_gq", "split_masked_clusters", "singleton_fallback",
      "per_image", "void_255", "num_known", "workers"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKeys.count(key)) throw ValidationError("unknown config key '" + key + "'");
  }
  try {
    if (doc.contains("tau")) cfg.tau = doc.at("tau").get<double>();
    if (doc.contains("beta_uk")) cfg.beta_uk = doc.at("beta_uk").get<double>();
    if (doc.contains("lambda")) cfg.lambda = doc.at("lambda").get<double>();
    if (doc.contains("connectivity")) cfg.connectivity = doc.at("connectivity").get<int>();
    if (doc.contains("min_segment_area")) cfg.min_segment_area = doc.at("min_segment_area").get<int>();
    if (doc.contains("method")) {
      cfg.method = identify_kind_from_string(doc.at("method").get<std::string>());
    }
    if (doc.contains("strict_n")) cfg.strict_n = doc.at("strict_n").get<bool>();
    if (doc.contains("fallback_gq")) cfg.fallback_gq = doc.at("fallback_gq").get<bool>();
    if (doc.contains("split_masked_clusters")) {
      cfg.split_masked_clusters = doc.at("split_masked_clusters").get<bool>();
    }
    if (doc.contains("singleton_fallback")) {
      cfg.singleton_fallback = doc.at("singleton_fallback").get<bool>();
    }
    if (doc.contains("per_image")) cfg.per_image = doc.at("per_image").get<bool>();
    if (doc.contains("void_255")) cfg.void_255 = doc.at("void_255").get<bool>();
    if (doc.contains("num_known")) cfg.num_known = doc.at("num_known").get<int>();
    if (doc.contains("workers")) cfg.workers = doc.at("workers").get<int>();
  } catch (const json::type_error& e) {
    throw ValidationError(std::string("config value has the wrong type: ") + e.what());
  }
  if (validate) cfg.validate();
  return cfg;
}

RunConfig read_run_config(const std::filesystem::path& path, bool validate) {
  return parse_run_config(read_text_file(path), validate);
}

namespace {

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json percent(const std::optional<double>& v) {
  if (!v) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *v * 100.0);
  return std::string(buf);
}

}  // namespace

std::string metric_report_json(const MetricReport& report) {
  nlohmann::ordered_json doc;
  doc["num_known"] = report.num_known;
  doc["images"] = report.images;
  doc["lambda"] = report.lambda;
  doc["strict_n"] = report.strict_n;
  doc["gq_fell_back"] = report.gq_fell_back;
  const std::pair<const char*, const std::optional<double>*> fields[] = {
      {"gq_known", &report.gq_known},   {"gq_unknown", &report.gq_unknown},
      {"gq", &report.gq},               {"gq_clu", &report.gq_clu},
      {"miou_clusters", &report.miou_clusters}, {"auroc", &report.auroc},
      {"aupr", &report.aupr},           {"fpr_at_95_tpr", &report.fpr_at_95_tpr}};
  nlohmann::ordered_json metrics;
  nlohmann::ordered_json display;
  for (const auto& [name, value] : fields) {
    metrics[name] = optional_number(*value);
    display[name] = percent(*value);
  }
  doc["metrics"] = std::move(metrics);
  doc["display_percent"] = std::move(display);
  auto rows = nlohmann::ordered_json::array();
  for (const PerClassRow& r : report.per_class) {
    rows.push_back({{"class_id", r.class_id}, {"iou_sum", r.iou_sum}, {"tp", r.tp}, {"fp", r.fp},
                    {"fn", r.fn}});
  }
  doc["per_class"] = std::move(rows);
  if (!report.per_image.empty()) {
    auto images = nlohmann::ordered_json::array();
    for (const PerImageRow& r : report.per_image) {
      images.push_back({{"name", r.name}, {"gq", optional_number(r.gq)}});
    }
    doc["per_image"] = std::move(images);
  }
  return doc.dump(2) + "\n";
}

std::string per_class_csv(const MetricReport& report) {
  std::ostringstream out;
  out << "class_id,iou_sum,tp,fp,fn\n";
  for (const PerClassRow& r : report.per_class) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", r.iou_sum);
    out << r.class_id << ',' << buf << ',' << r.tp << ',' << r.fp << ',' << r.fn << '\n';
  }
  return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed to write " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace goss
