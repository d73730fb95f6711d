#include "hgmlp/model_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "hgmlp/error.h"

namespace hgmlp {
namespace {

using nlohmann::json;

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw IoError("model file truncated (shape table)");
  }
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) {
    throw IoError("model file truncated (payload)");
  }
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | b[i];
  return std::bit_cast<double>(bits);
}

struct Shape {
  std::uint32_t rows;
  std::uint32_t cols;
};

std::vector<Shape> expected_shapes(const ModelParams& p) {
  std::vector<Shape> shapes;
  for (const auto& l : p.layers) {
    const auto w = static_cast<std::uint32_t>(l.weight.cols());
    shapes.push_back({static_cast<std::uint32_t>(l.weight.rows()), w});
    shapes.push_back({1, w});
    shapes.push_back({1, w});
  }
  shapes.push_back({static_cast<std::uint32_t>(p.head.rows()),
                    static_cast<std::uint32_t>(p.head.cols())});
  return shapes;
}

template <typename T>
T sidecar_field(const json& sidecar, const char* key) {
  auto it = sidecar.find(key);
  if (it == sidecar.end()) {
    throw IoError(std::string("model sidecar: missing '") + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw IoError(std::string("model sidecar: bad '") + key + "'");
  }
}

}  // namespace

void write_model_binary(const ModelParams& params, std::ostream& out) {
  params.validate();
  out.write(kModelMagic, sizeof(kModelMagic));
  const auto shapes = expected_shapes(params);
  put_u32(out, static_cast<std::uint32_t>(shapes.size()));
  for (const auto& s : shapes) {
    put_u32(out, s.rows);
    put_u32(out, s.cols);
  }
  for (const auto& t : params.tensors()) {
    for (double v : t) put_f64(out, v);
  }
}

ModelParams read_model_binary(std::istream& in, const json& sidecar) {
  if (sidecar_field<std::string>(sidecar, "format") != kModelSidecarFormat) {
    throw IoError("model sidecar: unsupported format");
  }
  ModelParams p;
  const auto input_dim = sidecar_field<std::size_t>(sidecar, "input_dim");
  const auto widths = sidecar_field<std::vector<std::size_t>>(sidecar, "widths");
  const auto classes = sidecar_field<std::size_t>(sidecar, "classes");
  if (sidecar_field<std::size_t>(sidecar, "layers") != widths.size()) {
    throw IoError("model sidecar: 'layers' disagrees with 'widths'");
  }
  p.dropout = sidecar_field<double>(sidecar, "dropout");
  p.ln_eps = sidecar_field<double>(sidecar, "ln_eps");
  std::size_t width = input_dim;
  for (std::size_t w : widths) {
    p.layers.push_back({Matrix(width, w), std::vector<double>(w),
                        std::vector<double>(w)});
    width = w;
  }
  p.head = Matrix(width, classes);
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("model sidecar: ") + e.what());
  }

  char magic[sizeof(kModelMagic)];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) {
    throw IoError("not an HGMLP1 model file (bad magic)");
  }
  const auto shapes = expected_shapes(p);
  const std::uint32_t count = get_u32(in);
  if (count != shapes.size()) {
    throw IoError("model file has " + std::to_string(count) +
                  " tensors, sidecar implies " + std::to_string(shapes.size()));
  }
  for (std::size_t t = 0; t < shapes.size(); ++t) {
    const std::uint32_t rows = get_u32(in);
    const std::uint32_t cols = get_u32(in);
    if (rows != shapes[t].rows || cols != shapes[t].cols) {
      throw IoError("model file tensor " + std::to_string(t) + " is " +
                    std::to_string(rows) + "x" + std::to_string(cols) +
                    ", sidecar implies " + std::to_string(shapes[t].rows) +
                    "x" + std::to_string(shapes[t].cols));
    }
  }
  for (auto t : p.tensors()) {
    for (double& v : t) v = get_f64(in);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw IoError("model file has trailing bytes");
  }
  return p;
}

json model_sidecar(const ModelParams& params, const json& extra) {
  json j;
  j["format"] = kModelSidecarFormat;
  j["input_dim"] = params.input_dim();
  j["widths"] = params.widths();
  j["layers"] = params.depth();
  j["classes"] = params.num_classes();
  j["dropout"] = params.dropout;
  j["ln_eps"] = params.ln_eps;
  j["extra"] = extra;
  return j;
}

std::filesystem::path sidecar_path(const std::filesystem::path& model_path) {
  return model_path.string() + ".json";
}

void save_model(const ModelParams& params, const std::filesystem::path& path,
                const json& extra) {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    write_model_binary(params, out);
    if (!out) throw IoError("failed writing " + path.string());
  }
  std::ofstream side(sidecar_path(path), std::ios::trunc);
  if (!side) throw IoError("cannot write " + sidecar_path(path).string());
  side << model_sidecar(params, extra).dump(2) << "\n";
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream side(sidecar_path(path));
  if (!side) throw IoError("cannot open model sidecar " + sidecar_path(path).string());
  LoadedModel m;
  try {
    m.sidecar = json::parse(side);
  } catch (const json::parse_error& e) {
    throw IoError("model sidecar: " + std::string(e.what()));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  m.params = read_model_binary(in, m.sidecar);
  return m;
}

}  // namespace hgmlp
