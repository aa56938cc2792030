#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "bodyfit/error.hpp"
#include "bodyfit/shape_model.hpp"

// Container layout (little-endian):
//   char[4] "BFSM", u32 version
//   u64 N_v, u64 N_f, u64 N_b, u64 K, u64 landmark count
//   f64[3 N_v] mean shape
//   f64[3 N_v * K] eigenvectors, column-major
//   f64[K] eigenvalues
//   N_b x { u32 name length, name bytes, f64[3] position, i32 parent,
//           u64 regressor length, u32[] regressor }
//   f64[N_v * N_b] skinning weights, row-major
//   u32[3 N_f] faces
//   u8[N_v] part labels
//   4 x { u32 joint, f64[3] axis }   (left hip, right hip, left/right humerus)
//   landmarks x { u32 name length, name bytes, u32 vertex }
//   char[4] "END."

namespace bodyfit {

static_assert(std::endian::native == std::endian::little,
              "model container I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'B', 'F', 'S', 'M'};
constexpr char kTrailer[4] = {'E', 'N', 'D', '.'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kSanityLimit = std::uint64_t{1} << 28;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <typename T>
  void pod(const T& v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void str(const std::string& s) {
    pod(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  template <typename T>
  T pod() {
    T v;
    bytes(&v, sizeof(T));
    return v;
  }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw ModelFormatError("model container is truncated or corrupt");
    }
  }
  std::string str() {
    const auto n = pod<std::uint32_t>();
    if (n > 4096) throw ModelFormatError("model container string too long");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  std::uint64_t count(const char* what) {
    const auto n = pod<std::uint64_t>();
    if (n > kSanityLimit) {
      throw ModelFormatError(std::string("implausible ") + what +
                             " count in model container");
    }
    return n;
  }

 private:
  std::istream& in_;
};

}  // namespace

void write_model(const StatModel& model, std::ostream& out) {
  model.validate();
  Writer w(out);
  const std::uint64_t nv = model.vertex_count();
  const std::uint64_t k = model.component_count();
  w.bytes(kMagic, 4);
  w.pod(kVersion);
  w.pod(nv);
  w.pod(static_cast<std::uint64_t>(model.faces.size()));
  w.pod(static_cast<std::uint64_t>(model.joints.size()));
  w.pod(k);
  w.pod(static_cast<std::uint64_t>(model.landmarks.size()));
  w.bytes(model.mean_shape.data(), sizeof(double) * 3 * nv);
  w.bytes(model.eigenvectors.data(), sizeof(double) * 3 * nv * k);
  w.bytes(model.eigenvalues.data(), sizeof(double) * k);
  for (const Joint& j : model.joints) {
    w.str(j.name);
    w.bytes(j.position.data(), sizeof(double) * 3);
    w.pod(static_cast<std::int32_t>(j.parent));
    w.pod(static_cast<std::uint64_t>(j.regressor.size()));
    w.bytes(j.regressor.data(), sizeof(std::uint32_t) * j.regressor.size());
  }
  for (Eigen::Index i = 0; i < model.skinning_weights.rows(); ++i) {
    for (Eigen::Index c = 0; c < model.skinning_weights.cols(); ++c) {
      w.pod(model.skinning_weights(i, c));
    }
  }
  w.bytes(model.faces.data(), sizeof(Face) * model.faces.size());
  for (BodyPart p : model.part_labels) w.pod(static_cast<std::uint8_t>(p));
  for (const PosableJoint& pj : model.posable_joints) {
    w.pod(pj.joint);
    w.bytes(pj.axis.data(), sizeof(double) * 3);
  }
  for (const auto& [name, idx] : model.landmarks) {
    w.str(name);
    w.pod(idx);
  }
  w.bytes(kTrailer, 4);
  if (!out) throw Error("failed writing model container");
}

StatModel read_model(std::istream& in) {
  Reader r(in);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw ModelFormatError("not a body model container (bad magic)");
  }
  const auto version = r.pod<std::uint32_t>();
  if (version != kVersion) {
    throw ModelFormatError("unsupported model container version " +
                           std::to_string(version) + " (expected " +
                           std::to_string(kVersion) + ")");
  }
  const auto nv = r.count("vertex");
  const auto nf = r.count("face");
  const auto nb = r.count("bone");
  const auto k = r.count("component");
  const auto nl = r.count("landmark");

  StatModel m;
  m.mean_shape.resize(static_cast<Eigen::Index>(3 * nv));
  r.bytes(m.mean_shape.data(), sizeof(double) * 3 * nv);
  m.eigenvectors.resize(static_cast<Eigen::Index>(3 * nv),
                        static_cast<Eigen::Index>(k));
  r.bytes(m.eigenvectors.data(), sizeof(double) * 3 * nv * k);
  m.eigenvalues.resize(static_cast<Eigen::Index>(k));
  r.bytes(m.eigenvalues.data(), sizeof(double) * k);
  m.joints.resize(nb);
  for (Joint& j : m.joints) {
    j.name = r.str();
    r.bytes(j.position.data(), sizeof(double) * 3);
    j.parent = r.pod<std::int32_t>();
    const auto nr = r.count("regressor");
    j.regressor.resize(nr);
    r.bytes(j.regressor.data(), sizeof(std::uint32_t) * nr);
  }
  m.skinning_weights.resize(static_cast<Eigen::Index>(nv),
                            static_cast<Eigen::Index>(nb));
  for (Eigen::Index i = 0; i < m.skinning_weights.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.skinning_weights.cols(); ++c) {
      m.skinning_weights(i, c) = r.pod<double>();
    }
  }
  m.faces.resize(nf);
  r.bytes(m.faces.data(), sizeof(Face) * nf);
  m.part_labels.resize(nv);
  for (BodyPart& p : m.part_labels) {
    const auto raw = r.pod<std::uint8_t>();
    if (!is_valid_body_part(raw)) {
      throw ModelFormatError("invalid body part label in model container");
    }
    p = static_cast<BodyPart>(raw);
  }
  for (PosableJoint& pj : m.posable_joints) {
    pj.joint = r.pod<std::uint32_t>();
    r.bytes(pj.axis.data(), sizeof(double) * 3);
  }
  for (std::uint64_t i = 0; i < nl; ++i) {
    std::string name = r.str();
    m.landmarks[name] = r.pod<std::uint32_t>();
  }
  char trailer[4];
  r.bytes(trailer, 4);
  if (std::memcmp(trailer, kTrailer, 4) != 0) {
    throw ModelFormatError("model container trailer missing or corrupt");
  }
  m.validate();
  return m;
}

void save_model(const StatModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file " + path.string());
  write_model(model, out);
}

StatModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open model file " + path.string());
  return read_model(in);
}

}  // namespace bodyfit
