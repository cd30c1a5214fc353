#include "cooc/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>
#include <zlib.h>

#include "cooc/errors.hpp"

namespace cooc {

using nlohmann::json;

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

std::ifstream open_binary(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("cannot open file: " + path.string());
  return in;
}

// Whole file as bytes; .gz files are inflated (MNIST ships gzipped).
std::vector<unsigned char> slurp(const fs::path& path) {
  if (path.extension() == ".gz") {
    gzFile gz = gzopen(path.string().c_str(), "rb");
    if (!gz) throw format_error("cannot open file: " + path.string());
    std::vector<unsigned char> data;
    unsigned char chunk[1 << 16];
    int got;
    while ((got = gzread(gz, chunk, sizeof chunk)) > 0)
      data.insert(data.end(), chunk, chunk + got);
    bool bad = got < 0;
    gzclose(gz);
    if (bad) throw format_error("corrupt gzip stream: " + path.string());
    return data;
  }
  std::ifstream in = open_binary(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Byte cursor over a loaded file.
struct ByteReader {
  const std::vector<unsigned char>& data;
  const fs::path& path;
  std::size_t pos = 0;

  std::uint32_t u32_be(const char* what) {
    if (pos + 4 > data.size())
      throw format_error(std::string("truncated header while reading ") + what +
                         ": " + path.string());
    std::uint32_t v = (std::uint32_t(data[pos]) << 24) |
                      (std::uint32_t(data[pos + 1]) << 16) |
                      (std::uint32_t(data[pos + 2]) << 8) |
                      std::uint32_t(data[pos + 3]);
    pos += 4;
    return v;
  }

  const unsigned char* bytes(std::size_t n, const char* what) {
    if (pos + n > data.size())
      throw format_error(std::string(what) + " truncated: " + path.string());
    const unsigned char* p = data.data() + pos;
    pos += n;
    return p;
  }
};

void write_u32_be(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint64_t read_u64_le(std::istream& in, const char* what) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8))
    throw format_error(std::string("truncated data while reading ") + what);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

void write_u64_le(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

}  // namespace

std::string to_string(DatasetSource source) {
  switch (source) {
    case DatasetSource::idx: return "idx";
    case DatasetSource::pgm_dir: return "pgm-dir";
    case DatasetSource::synthetic: return "synthetic";
  }
  return "synthetic";
}

DatasetSource dataset_source_from_string(const std::string& name) {
  if (name == "idx") return DatasetSource::idx;
  if (name == "pgm-dir") return DatasetSource::pgm_dir;
  if (name == "synthetic") return DatasetSource::synthetic;
  throw format_error("unknown dataset source: " + name);
}

std::vector<SignificanceMap> MapsDataset::significance_maps() const {
  std::vector<SignificanceMap> out;
  out.reserve(maps.size());
  for (const Bitset& b : maps) out.push_back({domain, b});
  return out;
}

void MapsDataset::validate() const {
  if (maps.empty()) throw format_error("maps dataset: empty");
  if (!labels.empty() && labels.size() != maps.size())
    throw format_error("maps dataset: label count != map count");
  for (int label : labels)
    if (label < 0 || label > 9)
      throw format_error("maps dataset: label outside [0,9]");
  for (const Bitset& b : maps)
    if (b.size() != domain.size())
      throw format_error("maps dataset: map length != domain size");
}

// ---- IDX ----

std::vector<Image> read_idx_images(const fs::path& path) {
  std::vector<unsigned char> file = slurp(path);
  ByteReader in{file, path};
  if (in.u32_be("idx magic") != kIdxImagesMagic)
    throw format_error("not an idx3-ubyte image file (magic mismatch): " +
                       path.string());
  std::uint32_t count = in.u32_be("image count");
  std::uint32_t rows = in.u32_be("row count");
  std::uint32_t cols = in.u32_be("column count");
  std::size_t per_image = std::size_t(rows) * cols;
  std::vector<Image> images;
  images.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const unsigned char* pixels = in.bytes(per_image, "idx image payload");
    Image img{int(cols), int(rows)};
    for (std::size_t p = 0; p < per_image; ++p)
      img.samples[p] = double(pixels[p]) / 255.0;
    images.push_back(std::move(img));
  }
  return images;
}

std::vector<int> read_idx_labels(const fs::path& path) {
  std::vector<unsigned char> file = slurp(path);
  ByteReader in{file, path};
  if (in.u32_be("idx magic") != kIdxLabelsMagic)
    throw format_error("not an idx1-ubyte label file (magic mismatch): " +
                       path.string());
  std::uint32_t count = in.u32_be("label count");
  const unsigned char* raw = in.bytes(count, "idx label payload");
  std::vector<int> labels(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    if (raw[i] > 9)
      throw format_error("idx label outside [0,9]: " + path.string());
    labels[i] = raw[i];
  }
  return labels;
}

void write_idx_images(const fs::path& path, const std::vector<Image>& images) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw format_error("cannot create file: " + path.string());
  int rows = images.empty() ? 0 : images.front().height;
  int cols = images.empty() ? 0 : images.front().width;
  write_u32_be(out, kIdxImagesMagic);
  write_u32_be(out, std::uint32_t(images.size()));
  write_u32_be(out, std::uint32_t(rows));
  write_u32_be(out, std::uint32_t(cols));
  for (const Image& img : images) {
    if (img.width != cols || img.height != rows)
      throw format_error("write_idx_images: images must share one shape");
    for (double v : img.samples) {
      double clamped = std::clamp(v, 0.0, 1.0);
      out.put(char(static_cast<unsigned char>(std::lround(clamped * 255.0))));
    }
  }
  if (!out) throw format_error("short write: " + path.string());
}

void write_idx_labels(const fs::path& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw format_error("cannot create file: " + path.string());
  write_u32_be(out, kIdxLabelsMagic);
  write_u32_be(out, std::uint32_t(labels.size()));
  for (int label : labels) out.put(char(static_cast<unsigned char>(label)));
  if (!out) throw format_error("short write: " + path.string());
}

// ---- PGM / PBM ----

namespace {

// Next header token, skipping whitespace and '#' comment lines.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(char(c));
  }
  if (tok.empty()) throw format_error("malformed PGM header");
  return tok;
}

int pgm_int(std::istream& in, const char* what) {
  std::string tok = pgm_token(in);
  try {
    std::size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw format_error(std::string("malformed PGM header field: ") + what);
  }
}

}  // namespace

Image read_pgm(const fs::path& path) {
  std::ifstream in = open_binary(path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (!in || m0 != 'P') throw format_error("not a PGM file: " + path.string());
  if (m1 == '2')
    throw format_error("ASCII (P2) PGM is not supported, use binary P5: " +
                       path.string());
  if (m1 != '5')
    throw format_error("unsupported PGM variant P" + std::string(1, m1) + ": " +
                       path.string());
  int width = pgm_int(in, "width");
  int height = pgm_int(in, "height");
  int maxval = pgm_int(in, "maxval");
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535)
    throw format_error("malformed PGM dimensions: " + path.string());
  // Header ends after exactly one whitespace byte (consumed by pgm_int's
  // terminating delimiter read).
  Image img(width, height);
  std::size_t n = img.size();
  if (maxval < 256) {
    std::vector<unsigned char> raw(n);
    if (!in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(n)))
      throw format_error("PGM payload truncated: " + path.string());
    for (std::size_t i = 0; i < n; ++i)
      img.samples[i] = double(raw[i]) / double(maxval);
  } else {
    std::vector<unsigned char> raw(2 * n);
    if (!in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(2 * n)))
      throw format_error("PGM payload truncated: " + path.string());
    for (std::size_t i = 0; i < n; ++i) {
      int v = (int(raw[2 * i]) << 8) | int(raw[2 * i + 1]);  // big-endian
      img.samples[i] = double(v) / double(maxval);
    }
  }
  return img;
}

std::vector<Image> read_pgm_dir(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw format_error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw format_error("no .pgm files in directory: " + dir.string());
  std::vector<Image> images;
  images.reserve(files.size());
  for (const fs::path& p : files) images.push_back(read_pgm(p));
  return images;
}

void write_pbm(const SignificanceMap& y, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw format_error("cannot create file: " + path.string());
  int w = y.domain.width, h = y.domain.height;
  out << "P4\n" << w << " " << h << "\n";
  int row_bytes = (w + 7) / 8;
  std::vector<unsigned char> row(row_bytes);
  for (int r = 0; r < h; ++r) {
    std::fill(row.begin(), row.end(), 0);
    for (int c = 0; c < w; ++c)
      if (y.bits.test(std::size_t(r) * w + c))
        row[c / 8] |= static_cast<unsigned char>(0x80 >> (c % 8));
    out.write(reinterpret_cast<const char*>(row.data()), row_bytes);
  }
  if (!out) throw format_error("short write: " + path.string());
}

// ---- Bitset dumps ----

void write_bitset(std::ostream& out, const Bitset& bits) {
  write_u64_le(out, bits.size());
  for (std::uint64_t w : bits.words()) write_u64_le(out, w);
}

Bitset read_bitset(std::istream& in) {
  std::uint64_t len = read_u64_le(in, "bitset length");
  Bitset bits(len);
  for (std::uint64_t& w : bits.words()) w = read_u64_le(in, "bitset words");
  // Bits past the logical length must be zero.
  if (len % 64 != 0 && !bits.words().empty()) {
    std::uint64_t mask = (std::uint64_t(1) << (len % 64)) - 1;
    if (bits.words().back() & ~mask)
      throw format_error("bitset dump has bits past its length");
  }
  return bits;
}

// ---- JSON helpers ----

namespace {

json domain_to_json(const IndexDomain& d) {
  json j = {{"kind", d.kind == IndexDomain::Kind::pixel ? "pixel" : "wavelet"},
            {"width", d.width},
            {"height", d.height}};
  if (d.kind == IndexDomain::Kind::wavelet)
    j["wavelet"] = {{"family", to_string(d.wavelet.family)},
                    {"levels", d.wavelet.levels}};
  return j;
}

IndexDomain domain_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  int w = j.at("width").get<int>();
  int h = j.at("height").get<int>();
  if (kind == "pixel") return IndexDomain::pixel(w, h);
  if (kind == "wavelet") {
    const json& ws = j.at("wavelet");
    WaveletSpec spec{wavelet_family_from_string(ws.at("family").get<std::string>()),
                     ws.at("levels").get<int>()};
    return IndexDomain::wavelet_domain(spec, w, h);
  }
  throw format_error("unknown domain kind: " + kind);
}

json parse_json_file(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw format_error("cannot open file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw format_error(std::string("malformed ") + what + " (" + e.what() +
                       "): " + path.string());
  }
}

void write_json_file(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw format_error("cannot create file: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw format_error("short write: " + path.string());
}

json model_to_json(const CoocModel& m) {
  json hists = json::array();
  for (const GroupHistogram& h : m.histograms)
    hists.push_back({{"edges", h.edges}, {"probs", h.probs}});
  return json{{"format", "cooc-model"},
              {"version", kModelFormatVersion},
              {"domain", domain_to_json(m.grouping.domain)},
              {"group_size", m.grouping.group_size},
              {"group_count", m.grouping.group_count},
              {"assignment", m.grouping.assignment},
              {"histograms", std::move(hists)},
              {"meta",
               {{"group_size", m.meta.group_size},
                {"bins", m.meta.bins},
                {"iterations", m.meta.iterations},
                {"final_bits", m.meta.final_bits},
                {"seed", m.meta.seed}}}};
}

CoocModel model_from_json(const json& j, const fs::path& path) {
  if (j.value("format", "") != "cooc-model")
    throw format_error("not a cooc-model file: " + path.string());
  int version = j.value("version", -1);
  if (version != kModelFormatVersion)
    throw format_error("unsupported cooc-model version " +
                       std::to_string(version) + " (expected " +
                       std::to_string(kModelFormatVersion) +
                       "): " + path.string());
  CoocModel m;
  try {
    m.grouping.domain = domain_from_json(j.at("domain"));
    m.grouping.group_size = j.at("group_size").get<int>();
    m.grouping.group_count = j.at("group_count").get<int>();
    m.grouping.assignment = j.at("assignment").get<std::vector<std::uint32_t>>();
    for (const json& hj : j.at("histograms")) {
      GroupHistogram h;
      h.edges = hj.at("edges").get<std::vector<int>>();
      h.probs = hj.at("probs").get<std::vector<double>>();
      m.histograms.push_back(std::move(h));
    }
    const json& meta = j.at("meta");
    m.meta.group_size = meta.at("group_size").get<int>();
    m.meta.bins = meta.at("bins").get<int>();
    m.meta.iterations = meta.at("iterations").get<int>();
    m.meta.final_bits = meta.at("final_bits").get<double>();
    m.meta.seed = meta.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw format_error(std::string("corrupted cooc-model field (") + e.what() +
                       "): " + path.string());
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw format_error(std::string("invalid cooc-model (") + e.what() +
                       "): " + path.string());
  }
  return m;
}

}  // namespace

// ---- Maps datasets ----

void save_maps(const MapsDataset& dataset, const fs::path& dir) {
  dataset.validate();
  fs::create_directories(dir);
  json manifest = {{"format", "cooc-maps"},
                   {"version", kModelFormatVersion},
                   {"source", to_string(dataset.source)},
                   {"count", dataset.maps.size()},
                   {"domain", domain_to_json(dataset.domain)}};
  if (!dataset.labels.empty()) manifest["labels"] = dataset.labels;
  write_json_file(manifest, dir / "manifest.json");
  std::ofstream out(dir / "maps.bits", std::ios::binary);
  if (!out) throw format_error("cannot create file: " + (dir / "maps.bits").string());
  for (const Bitset& b : dataset.maps) write_bitset(out, b);
  if (!out) throw format_error("short write: " + (dir / "maps.bits").string());
}

MapsDataset load_maps(const fs::path& dir) {
  json manifest = parse_json_file(dir / "manifest.json", "maps manifest");
  MapsDataset ds;
  try {
    if (manifest.value("format", "") != "cooc-maps")
      throw format_error("not a cooc-maps manifest: " + dir.string());
    int version = manifest.value("version", -1);
    if (version != kModelFormatVersion)
      throw format_error("unsupported cooc-maps version " +
                         std::to_string(version) + ": " + dir.string());
    ds.source = dataset_source_from_string(manifest.at("source").get<std::string>());
    ds.domain = domain_from_json(manifest.at("domain"));
    if (manifest.contains("labels"))
      ds.labels = manifest.at("labels").get<std::vector<int>>();
    std::size_t count = manifest.at("count").get<std::size_t>();
    std::ifstream in(dir / "maps.bits", std::ios::binary);
    if (!in)
      throw format_error("cannot open file: " + (dir / "maps.bits").string());
    ds.maps.reserve(count);
    for (std::size_t i = 0; i < count; ++i) ds.maps.push_back(read_bitset(in));
  } catch (const json::exception& e) {
    throw format_error(std::string("corrupted maps manifest (") + e.what() +
                       "): " + dir.string());
  }
  ds.validate();
  return ds;
}

// ---- Model files ----

void save_model(const CoocModel& model, const fs::path& path) {
  model.validate();
  write_json_file(model_to_json(model), path);
}

CoocModel load_model(const fs::path& path) {
  return model_from_json(parse_json_file(path, "cooc-model"), path);
}

void save_class_models(const std::vector<CoocModel>& models,
                       const fs::path& path) {
  json arr = json::array();
  for (const CoocModel& m : models) {
    m.validate();
    arr.push_back(model_to_json(m));
  }
  write_json_file(json{{"format", "cooc-class-models"},
                       {"version", kModelFormatVersion},
                       {"models", std::move(arr)}},
                  path);
}

std::vector<CoocModel> load_class_models(const fs::path& path) {
  json j = parse_json_file(path, "cooc-class-models");
  if (j.value("format", "") != "cooc-class-models")
    throw format_error("not a cooc-class-models file: " + path.string());
  int version = j.value("version", -1);
  if (version != kModelFormatVersion)
    throw format_error("unsupported cooc-class-models version " +
                       std::to_string(version) + ": " + path.string());
  std::vector<CoocModel> models;
  try {
    for (const json& mj : j.at("models"))
      models.push_back(model_from_json(mj, path));
  } catch (const json::exception& e) {
    throw format_error(std::string("corrupted cooc-class-models field (") +
                       e.what() + "): " + path.string());
  }
  if (models.empty())
    throw format_error("cooc-class-models file holds no models: " +
                       path.string());
  return models;
}

// ---- Synthetic specs ----

SyntheticSpec load_synthetic_spec(const fs::path& path) {
  json j = parse_json_file(path, "synthetic spec");
  SyntheticSpec spec;
  try {
    spec.domain_size = j.at("domain_size").get<int>();
    spec.width = j.value("width", 0);
    spec.height = j.value("height", 0);
    spec.group_size = j.at("group_size").get<int>();
    spec.count = j.at("count").get<int>();
    spec.seed = j.value("seed", std::uint64_t(0));
    if (j.contains("probs")) {
      for (const json& pj : j.at("probs"))
        spec.probs.emplace_back(pj.at("p_on").get<double>(),
                                pj.at("p_off").get<double>());
    } else {
      double p_on = j.at("p_on").get<double>();
      double p_off = j.at("p_off").get<double>();
      spec.probs.assign(std::size_t(spec.planted_groups()), {p_on, p_off});
    }
  } catch (const json::exception& e) {
    throw format_error(std::string("corrupted synthetic spec (") + e.what() +
                       "): " + path.string());
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw format_error(std::string("invalid synthetic spec (") + e.what() +
                       "): " + path.string());
  }
  return spec;
}

void save_synthetic_spec(const SyntheticSpec& spec, const fs::path& path) {
  spec.validate();
  json probs = json::array();
  for (const auto& [p_on, p_off] : spec.probs)
    probs.push_back({{"p_on", p_on}, {"p_off", p_off}});
  json j = {{"domain_size", spec.domain_size},
            {"group_size", spec.group_size},
            {"count", spec.count},
            {"seed", spec.seed},
            {"probs", std::move(probs)}};
  if (spec.width > 0) {
    j["width"] = spec.width;
    j["height"] = spec.height;
  }
  write_json_file(j, path);
}

}  // namespace cooc
