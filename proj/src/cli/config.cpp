#include "preacq/cli/config.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "preacq/actions/actions.hpp"
#include "preacq/geometry/image_io.hpp"
#include "preacq/geometry/recon.hpp"

namespace preacq::cli {

using nlohmann::json;

namespace {

// Typed access to one JSON object with path-qualified errors.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!ok.count(it.key())) throw ConfigError(field(it.key()), "unknown field");
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    return v.get<double>();
  }
  void number_into(const char* key, double& target) const { target = number(key, target); }

  long long integer(const char* key, long long fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
    return v.get<long long>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  template <int N>
  Eigen::Matrix<double, N, 1> vec(const char* key, const Eigen::Matrix<double, N, 1>& fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != N) {
      throw ConfigError(field(key), "expected an array of " + std::to_string(N) + " numbers");
    }
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) {
      if (!v[i].is_number()) throw ConfigError(field(key), "expected numbers");
      out[i] = v[i].get<double>();
    }
    return out;
  }

  Section child(const char* key) const { return Section(j_.at(key), field(key)); }
  const json& raw(const char* key) const { return j_.at(key); }

 private:
  const json& j_;
  std::string path_;
};

template <typename F>
void checked(const std::string& field, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(field, e.what());
  }
}

void apply_material_overrides(materials::MaterialParams& m, const Section& s) {
  s.allow({"model", "young_modulus", "poisson_ratio", "yield_stress", "mass_density",
           "sampling_density", "friction_plate", "friction_fork"});
  if (s.has("model")) {
    checked(s.field("model"), [&] { m.model = materials::model_class_from_string(s.string("model", "")); });
  }
  s.number_into("young_modulus", m.young_modulus);
  s.number_into("poisson_ratio", m.poisson_ratio);
  s.number_into("yield_stress", m.yield_stress);
  s.number_into("mass_density", m.mass_density);
  s.number_into("sampling_density", m.sampling_density);
  s.number_into("friction_plate", m.friction_plate);
  s.number_into("friction_fork", m.friction_fork);
  m.placeholder = false;
  checked(s.field(""), [&] {
    m.refresh_lame();
    m.validate();
  });
}

ItemSource parse_source(const Section& s) {
  ItemSource src;
  const std::string type = s.string("type", "");
  if (type == "heightmap") {
    s.allow({"type", "label"});
    src.kind = ItemSource::Kind::Heightmap;
    const long long label = s.integer("label", -1);
    if (label < 1 || label > static_cast<long long>(kMaxItemId)) {
      throw ConfigError(s.field("label"), "mask label must be in 1..255");
    }
    src.label = static_cast<ItemId>(label);
    return src;
  }
  s.allow({"type", "center", "yaw_deg", "length", "width", "height", "radius"});
  src.kind = ItemSource::Kind::Primitive;
  auto& p = src.primitive;
  checked(s.field("type"), [&] { p.kind = geometry::HeightPrimitive::kind_from_string(type); });
  const Eigen::Vector2d c = s.vec<2>("center", Eigen::Vector2d::Zero());
  p.center_x = c.x();
  p.center_z = c.y();
  p.yaw = s.number("yaw_deg", 0.0) * std::numbers::pi / 180.0;
  p.length = s.number("length", 0.0);
  p.width = s.number("width", 0.0);
  p.height = s.number("height", 0.0);
  p.radius = s.number("radius", 0.0);
  return src;
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

SceneConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  SceneConfig cfg;
  cfg.raw = doc;
  const Section root(doc, "");
  root.allow({"seed", "grid", "plate", "fork", "camera", "sim", "materials", "heightmap", "items",
              "estimator", "planner", "actions", "description"});

  const long long seed = root.integer("seed", 0);
  if (seed < 0) throw ConfigError("seed", "must be non-negative");
  cfg.layout.seed = static_cast<std::uint64_t>(seed);

  if (root.has("grid")) {
    const Section g = root.child("grid");
    g.allow({"dims", "domain_size", "domain_origin", "dt", "gravity", "contact_threshold",
             "sticky_layers", "cfl"});
    auto& s = cfg.layout.sim;
    s.grid_dims = static_cast<int>(g.integer("dims", s.grid_dims));
    g.number_into("domain_size", s.domain_size);
    s.domain_origin = g.vec<3>("domain_origin", s.domain_origin);
    g.number_into("dt", s.dt);
    s.gravity = g.vec<3>("gravity", s.gravity);
    g.number_into("contact_threshold", s.contact_threshold);
    s.sticky_layers = static_cast<int>(g.integer("sticky_layers", s.sticky_layers));
    g.number_into("cfl", s.cfl);
    checked("grid", [&] { s.validate(); });
  }
  if (root.has("plate")) {
    const Section p = root.child("plate");
    p.allow({"radius", "rim_height", "base_thickness", "blend", "center"});
    auto& d = cfg.layout.plate;
    p.number_into("radius", d.radius);
    p.number_into("rim_height", d.rim_height);
    p.number_into("base_thickness", d.base_thickness);
    p.number_into("blend", d.blend);
    cfg.layout.plate_center = p.vec<3>("center", cfg.layout.plate_center);
    checked("plate", [&] { d.validate(); });
  }
  if (root.has("fork")) {
    const Section f = root.child("fork");
    f.allow({"tine_count", "tine_length", "tine_radius", "tine_spacing", "neck_length",
             "neck_thickness", "handle_length", "handle_width", "handle_thickness", "tine_web"});
    auto& d = cfg.layout.fork;
    d.tine_count = static_cast<int>(f.integer("tine_count", d.tine_count));
    f.number_into("tine_length", d.tine_length);
    f.number_into("tine_radius", d.tine_radius);
    f.number_into("tine_spacing", d.tine_spacing);
    f.number_into("neck_length", d.neck_length);
    f.number_into("neck_thickness", d.neck_thickness);
    f.number_into("handle_length", d.handle_length);
    f.number_into("handle_width", d.handle_width);
    f.number_into("handle_thickness", d.handle_thickness);
    d.tine_web = f.boolean("tine_web", d.tine_web);
    checked("fork", [&] { d.validate(); });
  }
  if (root.has("camera")) {
    const Section c = root.child("camera");
    c.allow({"pixels"});
    cfg.layout.camera_pixels = static_cast<int>(c.integer("pixels", cfg.layout.camera_pixels));
    if (cfg.layout.camera_pixels < 2) throw ConfigError("camera.pixels", "must be at least 2");
  }
  if (root.has("sim")) {
    const Section s = root.child("sim");
    s.allow({"settle_time"});
    cfg.settle_time = s.number("settle_time", cfg.settle_time);
    if (!(cfg.settle_time >= 0.0)) throw ConfigError("sim.settle_time", "must be >= 0");
  }
  if (root.has("materials")) {
    const json& mats = root.raw("materials");
    if (!mats.is_object()) throw ConfigError("materials", "expected an object");
    for (auto it = mats.begin(); it != mats.end(); ++it) {
      const Section ms(it.value(), "materials." + it.key());
      materials::MaterialParams m;
      if (cfg.materials.contains(it.key())) {
        m = cfg.materials.at(it.key());
      } else {
        if (!ms.has("model")) throw ConfigError(ms.field("model"), "required for a new category");
        m.category = it.key();
      }
      apply_material_overrides(m, ms);
      cfg.materials.set(m);
    }
  }
  if (root.has("heightmap")) {
    const Section h = root.child("heightmap");
    h.allow({"depth", "mask"});
    if (!h.has("depth") || !h.has("mask")) {
      throw ConfigError("heightmap", "needs both depth and mask files");
    }
    cfg.heightmap_depth = base_dir / h.string("depth", "");
    cfg.heightmap_mask = base_dir / h.string("mask", "");
  }
  if (root.has("items")) {
    const json& items = root.raw("items");
    if (!items.is_array()) throw ConfigError("items", "expected an array");
    std::set<ItemId> seen;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const Section is(items[i], "items[" + std::to_string(i) + "]");
      is.allow({"id", "category", "source", "material"});
      ItemConfig item;
      const long long id = is.integer("id", static_cast<long long>(i) + 1);
      if (id < 1 || id > static_cast<long long>(kMaxItemId)) {
        throw ConfigError(is.field("id"), "must be in 1..255");
      }
      item.id = static_cast<ItemId>(id);
      if (!seen.insert(item.id).second) throw ConfigError(is.field("id"), "duplicate item id");
      item.category = is.string("category", "");
      if (!cfg.materials.contains(item.category)) {
        throw ConfigError(is.field("category"), "unknown category '" + item.category + "'");
      }
      if (!is.has("source")) throw ConfigError(is.field("source"), "required");
      item.source = parse_source(is.child("source"));
      if (item.source.kind == ItemSource::Kind::Heightmap && !cfg.heightmap_depth) {
        throw ConfigError(is.field("source"), "heightmap source without a heightmap section");
      }
      if (is.has("material")) {
        item.material = is.raw("material");
        materials::MaterialParams probe = cfg.materials.at(item.category);
        apply_material_overrides(probe, is.child("material"));
      }
      cfg.items.push_back(std::move(item));
    }
  }
  if (root.has("estimator")) {
    const Section e = root.child("estimator");
    e.allow({"env_distance", "bite_volume_min", "bite_volume_max", "density_ref",
             "skewer_base_elastic", "skewer_base_elastoplastic", "skewer_base_plastic",
             "skewer_not_bite_factor", "skewer_roll_penalty", "flat_top_min",
             "scoop_base_plastic", "scoop_base_elastoplastic", "scoop_base_elastic",
             "scoop_isolated_factor", "scoop_density_min", "twirl_noodle", "twirl_other",
             "roll_elongation", "roll_height_ratio"});
    auto& c = cfg.planner.estimator;
    e.number_into("env_distance", c.env_distance);
    e.number_into("bite_volume_min", c.bite_volume_min);
    e.number_into("bite_volume_max", c.bite_volume_max);
    e.number_into("density_ref", c.density_ref);
    e.number_into("skewer_base_elastic", c.skewer_base_elastic);
    e.number_into("skewer_base_elastoplastic", c.skewer_base_elastoplastic);
    e.number_into("skewer_base_plastic", c.skewer_base_plastic);
    e.number_into("skewer_not_bite_factor", c.skewer_not_bite_factor);
    e.number_into("skewer_roll_penalty", c.skewer_roll_penalty);
    e.number_into("flat_top_min", c.flat_top_min);
    e.number_into("scoop_base_plastic", c.scoop_base_plastic);
    e.number_into("scoop_base_elastoplastic", c.scoop_base_elastoplastic);
    e.number_into("scoop_base_elastic", c.scoop_base_elastic);
    e.number_into("scoop_isolated_factor", c.scoop_isolated_factor);
    e.number_into("scoop_density_min", c.scoop_density_min);
    e.number_into("twirl_noodle", c.twirl_noodle);
    e.number_into("twirl_other", c.twirl_other);
    e.number_into("roll_elongation", c.roll_elongation);
    e.number_into("roll_height_ratio", c.roll_height_ratio);
    checked("estimator", [&] { c.validate(); });
  }
  if (root.has("actions")) {
    const Section a = root.child("actions");
    a.allow({"descent_speed", "approach_clearance", "approach_gap", "push_speed",
             "push_tip_height", "cut_speed", "cut_bottom_clearance", "flick_distance",
             "flick_speed", "flip_speed", "flip_elevation_deg", "flip_height_fraction",
             "flip_travel_factor", "monitor_distance", "post_action_settle", "max_duration",
             "fragment_radius", "min_fragment_fraction"});
    auto& p = cfg.planner.actions;
    a.number_into("descent_speed", p.descent_speed);
    a.number_into("approach_clearance", p.approach_clearance);
    a.number_into("approach_gap", p.approach_gap);
    a.number_into("push_speed", p.push_speed);
    a.number_into("push_tip_height", p.push_tip_height);
    a.number_into("cut_speed", p.cut_speed);
    a.number_into("cut_bottom_clearance", p.cut_bottom_clearance);
    a.number_into("flick_distance", p.flick_distance);
    a.number_into("flick_speed", p.flick_speed);
    a.number_into("flip_speed", p.flip_speed);
    a.number_into("flip_elevation_deg", p.flip_elevation_deg);
    a.number_into("flip_height_fraction", p.flip_height_fraction);
    a.number_into("flip_travel_factor", p.flip_travel_factor);
    a.number_into("monitor_distance", p.monitor_distance);
    a.number_into("post_action_settle", p.post_action_settle);
    a.number_into("max_duration", p.max_duration);
    a.number_into("fragment_radius", p.fragment_radius);
    a.number_into("min_fragment_fraction", p.min_fragment_fraction);
    checked("actions", [&] { p.validate(); });
  }
  if (root.has("planner")) {
    const Section p = root.child("planner");
    p.allow({"threshold", "retry_once", "success_slack", "workers", "render_mode"});
    auto& c = cfg.planner;
    p.number_into("threshold", c.threshold);
    c.retry_once = p.boolean("retry_once", c.retry_once);
    p.number_into("success_slack", c.success_slack);
    c.workers = static_cast<int>(p.integer("workers", c.workers));
    if (p.has("render_mode")) {
      checked("planner.render_mode",
              [&] { c.render_mode = render::render_mode_from_string(p.string("render_mode", "")); });
    }
    checked("planner", [&] { c.validate(); });
  }
  return cfg;
}

SceneConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ":" + std::to_string(line_of_offset(text, e.byte)),
                      "syntax error: " + std::string(e.what()));
  }
  return parse_config(doc, path.parent_path());
}

materials::MaterialParams item_material(const SceneConfig& cfg, const ItemConfig& item) {
  materials::MaterialParams m = cfg.materials.at(item.category);
  if (!item.material.is_null()) {
    apply_material_overrides(m, Section(item.material, "items.material"));
    // A private category keeps overridden items from sharing parameters.
    m.category = item.category + "#" + std::to_string(item.id);
  }
  return m;
}

void compose_heightmap(const SceneConfig& cfg, const render::CameraSpec& camera,
                       geometry::DepthMap& depth, geometry::SegMask& mask) {
  const auto& r = camera.raster;
  depth = geometry::DepthMap::zeros(r.width, r.height, r.pitch);
  mask = geometry::SegMask::background(r.width, r.height);
  std::optional<geometry::DepthMap> file_depth;
  std::optional<geometry::SegMask> file_mask;
  if (cfg.heightmap_depth) {
    try {
      file_depth = geometry::read_pfm(*cfg.heightmap_depth, r.pitch);
      file_mask = geometry::read_pgm(*cfg.heightmap_mask);
    } catch (const Error& e) {
      throw ConfigError("heightmap", e.what());
    }
    if (file_depth->width != r.width || file_depth->height != r.height ||
        file_mask->width != r.width || file_mask->height != r.height) {
      throw ConfigError("heightmap", "image size does not match camera.pixels");
    }
  }
  for (std::size_t i = 0; i < cfg.items.size(); ++i) {
    const auto& item = cfg.items[i];
    const std::string field = "items[" + std::to_string(i) + "]";
    if (item.source.kind == ItemSource::Kind::Primitive) {
      geometry::HeightPrimitive p = item.source.primitive;
      p.center_x += cfg.layout.plate_center.x();
      p.center_z += cfg.layout.plate_center.z();
      checked(field + ".source", [&] { geometry::stamp(p, item.id, r, depth, mask); });
    } else {
      std::size_t n = 0;
      for (std::size_t k = 0; k < r.size(); ++k) {
        if (file_mask->labels[k] != item.source.label) continue;
        if (mask.labels[k] != kBackground) {
          throw ConfigError(field + ".source", "heightmap item overlaps another item");
        }
        mask.labels[k] = static_cast<std::uint8_t>(item.id);
        depth.values[k] = file_depth->values[k];
        ++n;
      }
      if (n == 0) throw ConfigError(field + ".source", "mask label not present in the heightmap");
    }
  }
}

BuildOutput build_scene(const SceneConfig& cfg, bool settle) {
  BuildOutput out;
  out.scene = scene::make_empty_scene(cfg.layout);
  compose_heightmap(cfg, out.scene.camera, out.depth, out.mask);
  const auto tmpl = geometry::TemplateQuadMesh::flat(out.scene.camera.raster);
  const double wall = cfg.layout.plate.wall_radius();
  for (std::size_t i = 0; i < cfg.items.size(); ++i) {
    const auto& item = cfg.items[i];
    const std::string field = "items[" + std::to_string(i) + "]";
    const auto d = geometry::mask_depth(out.depth, out.mask, item.id);
    auto mesh = geometry::deform_template(tmpl, d);
    mesh.item_id = item.id;
    mesh.category = item.category;
    auto closed = geometry::close_and_volume(mesh, d);
    // Footprints must sit inside the plate wall.
    const auto& r = out.scene.camera.raster;
    for (int v = 0; v < r.height; ++v) {
      for (int u = 0; u < r.width; ++u) {
        if (!closed.mesh.footprint[closed.mesh.raster.width * v + u]) continue;
        const double dx = r.center_x(u) - cfg.layout.plate_center.x();
        const double dz = r.center_z(v) - cfg.layout.plate_center.z();
        if (std::hypot(dx, dz) + 0.5 * r.pitch > wall) {
          throw ConfigError(field, "footprint extends past the plate wall");
        }
      }
    }
    const auto params = item_material(cfg, item);
    auto set = geometry::sample_particles(closed.mesh, params, cfg.layout.seed);
    out.scene.add_item(set, params);
    out.items.push_back({item.id, item.category, closed.volume, set.positions.size(),
                         closed.mesh.footprint_pixels()});
    out.scene.items.back().category = item.category;
    out.meshes.push_back(std::move(closed.mesh));
  }
  if (settle && cfg.settle_time > 0.0 && !out.scene.world.particles.empty()) {
    actions::settle(out.scene, cfg.settle_time);
  }
  return out;
}

namespace {

struct Fnv {
  std::uint64_t h = 0xcbf29ce484222325ull;
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ull;
    }
  }
  template <typename T>
  void value(const T& v) {
    bytes(&v, sizeof(T));
  }
};

}  // namespace

std::uint64_t scene_hash(const scene::Scene& s) {
  Fnv f;
  f.value(s.world.time);
  f.value(s.world.particles.size());
  for (const auto& p : s.world.particles) {
    for (int i = 0; i < 3; ++i) f.value(p.x[i]);
    for (int i = 0; i < 3; ++i) f.value(p.v[i]);
    for (int i = 0; i < 9; ++i) f.value(p.F.data()[i]);
    f.value(p.Jp);
    f.value(p.mass);
    f.value(p.material);
    f.value(p.item);
  }
  for (const auto& it : s.items) {
    f.value(it.id);
    f.bytes(it.category.data(), it.category.size());
  }
  return f.h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace preacq::cli
