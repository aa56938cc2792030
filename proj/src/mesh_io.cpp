#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "bodyfit/error.hpp"
#include "bodyfit/mesh.hpp"
#include "text_util.hpp"

namespace bodyfit {

namespace {

long parse_face_index(std::string_view token, std::size_t vertex_count,
                      std::size_t line) {
  // "f 1/2/3" style records: only the position index matters.
  const auto slash = token.find('/');
  if (slash != std::string_view::npos) token = token.substr(0, slash);
  long idx = 0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), idx);
  if (ec != std::errc() || ptr != token.data() + token.size() || idx == 0) {
    throw ParseError("bad face index '" + std::string(token) + "'", line);
  }
  // Negative indices are relative to the vertices read so far.
  const long resolved =
      idx > 0 ? idx - 1 : static_cast<long>(vertex_count) + idx;
  if (resolved < 0) {
    throw ParseError("face index " + std::to_string(idx) + " out of range",
                     line);
  }
  return resolved;
}

}  // namespace

Mesh read_mesh(std::istream& in) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<std::size_t> face_lines;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto tokens = detail::split_ws(raw);
    if (tokens.empty()) continue;
    if (tokens[0] == "v") {
      if (tokens.size() < 4) throw ParseError("vertex needs 3 coordinates", line);
      Vec3 v;
      for (int k = 0; k < 3; ++k) {
        auto parsed = detail::parse_double(tokens[k + 1]);
        if (!parsed) {
          throw ParseError("bad coordinate '" + std::string(tokens[k + 1]) + "'",
                           line);
        }
        v[k] = *parsed;
      }
      vertices.push_back(v);
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) throw ParseError("face needs 3 indices", line);
      std::vector<long> idx;
      for (std::size_t k = 1; k < tokens.size(); ++k) {
        idx.push_back(parse_face_index(tokens[k], vertices.size(), line));
      }
      // Fan-triangulate polygons.
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        faces.push_back({static_cast<std::uint32_t>(idx[0]),
                         static_cast<std::uint32_t>(idx[k]),
                         static_cast<std::uint32_t>(idx[k + 1])});
        face_lines.push_back(line);
      }
    }
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (std::uint32_t i : faces[f]) {
      if (i >= vertices.size()) {
        throw ParseError("face index " + std::to_string(i + 1) +
                             " out of range for " +
                             std::to_string(vertices.size()) + " vertices",
                         face_lines[f]);
      }
    }
    const Face& t = faces[f];
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw ParseError("face repeats a vertex", face_lines[f]);
    }
  }
  return Mesh(std::move(vertices), std::move(faces));
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file " + path.string());
  return read_mesh(in);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  for (const Vec3& v : mesh.vertices()) {
    out << "v " << detail::format_double(v.x()) << ' '
        << detail::format_double(v.y()) << ' ' << detail::format_double(v.z())
        << '\n';
  }
  for (const Face& f : mesh.faces()) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write mesh file " + path.string());
  write_mesh(mesh, out);
}

void write_cross_section_csv(const CrossSection& section, std::ostream& out) {
  out << "loop,x,y,z\n";
  for (std::size_t l = 0; l < section.loops.size(); ++l) {
    for (const Vec3& p : section.loops[l]) {
      out << l << ',' << detail::format_double(p.x()) << ','
          << detail::format_double(p.y()) << ','
          << detail::format_double(p.z()) << '\n';
    }
  }
}

}  // namespace bodyfit
