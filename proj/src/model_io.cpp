#include "lathop/model_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace lathop {

using nlohmann::json;

namespace {

json coords_json(const std::array<int, kMaxDim>& c, int dim) {
  json arr = json::array();
  for (int i = 0; i < dim; ++i) arr.push_back(c[i]);
  return arr;
}

std::array<int, kMaxDim> coords_from(const json& j, int dim, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw InputError(what + " must be an integer array of length dim");
  std::array<int, kMaxDim> c{0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    if (!j[i].is_number_integer()) throw InputError(what + " must hold integers");
    c[i] = j[i].get<int>();
  }
  return c;
}

double number_at(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InputError(where + ": missing '" + key + "'");
  if (!j[key].is_number()) throw InputError(where + ": '" + key + "' must be a number");
  return j[key].get<double>();
}

std::size_t site_index(const Lattice& lat, const json& j, const std::string& where) {
  const Site s(coords_from(j, lat.dim(), where + " site"));
  if (!lat.contains(s)) throw InputError(where + ": site outside the lattice");
  return lat.index(s);
}

}  // namespace

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.contains(key)) throw InputError(where + ": unknown key '" + key + "'");
}

json model_to_json(const HoppingModel& mdl, const json& provenance) {
  const Lattice& lat = mdl.lattice();
  const int d = lat.dim();
  json j;
  j["version"] = kModelFormatVersion;
  j["dim"] = d;
  j["extents"] = coords_json(lat.extents(), d);
  j["spacing"] = lat.spacing();
  json kernel = json::array();
  for (const auto& [n, v] : mdl.kernel().amplitudes())
    kernel.push_back({{"offset", coords_json(n.delta, d)}, {"re", v.real()}, {"im", v.imag()}});
  j["kernel"] = std::move(kernel);
  json z = json::array();
  for (const auto& [key, v] : mdl.zfield().entries())
    z.push_back({{"site", coords_json(lat.site(key.first).coords, d)},
                 {"offset", coords_json(key.second.delta, d)},
                 {"re", v.real()},
                 {"im", v.imag()}});
  j["zfield"] = std::move(z);
  json onsite = json::array();
  for (const auto& [site, im] : mdl.onsite_im())
    onsite.push_back({{"site", coords_json(lat.site(site).coords, d)}, {"im", im}});
  j["onsite"] = std::move(onsite);
  if (!provenance.is_null()) j["provenance"] = provenance;
  return j;
}

HoppingModel model_from_json(const json& j) {
  require_keys(j, {"version", "dim", "extents", "spacing", "kernel", "zfield", "onsite", "provenance"},
               "model");
  if (j.contains("version") && j["version"] != kModelFormatVersion)
    throw InputError("model: unsupported format version");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) throw InputError("model: 'dim' missing");
  const int d = j["dim"].get<int>();
  if (d < 1 || d > kMaxDim) throw InputError("model: 'dim' must be 1, 2 or 3");
  if (!j.contains("extents")) throw InputError("model: 'extents' missing");
  const Lattice lat(d, coords_from(j["extents"], d, "model extents"), number_at(j, "spacing", "model"));

  if (!j.contains("kernel") || !j["kernel"].is_array())
    throw InputError("model: 'kernel' must be an array");
  std::map<Offset, cplx> amp;
  for (const auto& e : j["kernel"]) {
    require_keys(e, {"offset", "re", "im"}, "kernel entry");
    if (!e.contains("offset")) throw InputError("kernel entry: missing 'offset'");
    const Offset n(coords_from(e["offset"], d, "kernel offset"));
    if (amp.contains(n)) throw InputError("kernel entry: duplicate offset");
    amp[n] = {number_at(e, "re", "kernel entry"), number_at(e, "im", "kernel entry")};
  }
  HomogeneousKernel kernel(d, lat.spacing(), std::move(amp));

  InhomogeneityField z;
  if (j.contains("zfield")) {
    if (!j["zfield"].is_array()) throw InputError("model: 'zfield' must be an array");
    for (const auto& e : j["zfield"]) {
      require_keys(e, {"site", "offset", "re", "im"}, "zfield entry");
      if (!e.contains("site") || !e.contains("offset"))
        throw InputError("zfield entry: missing 'site' or 'offset'");
      const std::size_t x = site_index(lat, e["site"], "zfield entry");
      const Offset n(coords_from(e["offset"], d, "zfield offset"));
      if (z.contains(x, n)) throw InputError("zfield entry: duplicate (site, offset)");
      z.set(x, n, {number_at(e, "re", "zfield entry"), number_at(e, "im", "zfield entry")});
    }
  }

  std::map<std::size_t, double> onsite;
  if (j.contains("onsite")) {
    if (!j["onsite"].is_array()) throw InputError("model: 'onsite' must be an array");
    for (const auto& e : j["onsite"]) {
      require_keys(e, {"site", "im"}, "onsite entry");
      if (!e.contains("site")) throw InputError("onsite entry: missing 'site'");
      const std::size_t x = site_index(lat, e["site"], "onsite entry");
      if (onsite.contains(x)) throw InputError("onsite entry: duplicate site");
      onsite[x] = number_at(e, "im", "onsite entry");
    }
  }
  return {lat, std::move(kernel), std::move(z), std::move(onsite)};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

HoppingModel read_model_file(const std::string& path) {
  try {
    return model_from_json(parse_json_text(read_text_file(path)));
  } catch (const json::exception& e) {
    throw InputError(std::string("model file: ") + e.what());
  }
}

void write_model_file(const std::string& path, const HoppingModel& mdl, const json& provenance) {
  write_text_file(path, model_to_json(mdl, provenance).dump(2) + "\n");
}

}  // namespace lathop
