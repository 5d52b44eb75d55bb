// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/pipeline.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "matbake/error.h"
#include "matbake/rng.h"
#include "matbake/guides.h"
#include "matbake/metrics.h"
#include "matbake/warp.h"

namespace matbake {

namespace fs = std::filesystem;

namespace {

const std::vector<std::pair<std::string, std::string>>& config_schema() {
  static const std::vector<std::pair<std::string, std::string>> schema = {
      {"paths", "mesh"},          {"paths", "probe"},
      {"paths", "output"},        {"paths", "frames"},
      {"paths", "checkpoint"},    {"paths", "truth"},
      {"paths", "metrics_a"},     {"paths", "metrics_b"},
      {"paths", "metrics_masks"},
      {"scene", "normalize"},     {"scene", "probe_rotation"},
      {"orbit", "frames"},        {"orbit", "elevation"},
      {"orbit", "radius"},        {"orbit", "fov"},
      {"orbit", "width"},         {"orbit", "height"},
      {"render", "spp"},          {"render", "spp_backward"},
      {"render", "bounces"},      {"render", "seed"},
      {"render", "diffuse_only"}, {"render", "workers"},
      {"render", "material"},     {"render", "base_color"},
      {"render", "roughness"},    {"render", "metallic"},
      {"render", "write_intrinsics"}, {"render", "write_hdr"},
      {"field", "levels"},        {"field", "table_size_log2"},
      {"field", "features"},      {"field", "res_min"},
      {"field", "res_max"},       {"field", "hidden"},
      {"field", "hidden_layers"}, {"field", "seed"},
      {"optim", "iterations"},    {"optim", "batch"},
      {"optim", "lr_table"},      {"optim", "lr_mlp"},
      {"optim", "beta1"},         {"optim", "beta2"},
      {"optim", "epsilon"},       {"optim", "lambda"},
      {"optim", "checkpoint_every"},
      {"bake", "resolution"},
      {"warp", "source_frame"},
      {"relight", "probes"},      {"relight", "spp"},
  };
  return schema;
}

std::string frame_name(size_t index, const char* suffix = "", const char* ext = ".png") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%05zu%s%s", index, suffix, ext);
  return buf;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("missing required config value: " + what);
}

}  // namespace

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  return from_config(ConfigFile::parse_file(path));
}

PipelineConfig PipelineConfig::from_config(const ConfigFile& cfg) {
  cfg.check_known_keys(config_schema());
  PipelineConfig out;
  out.mesh_path = cfg.get_string("paths", "mesh", "");
  out.probe_path = cfg.get_string("paths", "probe", "");
  out.output_dir = cfg.get_string("paths", "output", out.output_dir);
  out.frames_dir = cfg.get_string("paths", "frames", "");
  out.checkpoint_path = cfg.get_string("paths", "checkpoint", "");
  out.truth_dir = cfg.get_string("paths", "truth", "");
  out.metrics_dir_a = cfg.get_string("paths", "metrics_a", "");
  out.metrics_dir_b = cfg.get_string("paths", "metrics_b", "");
  out.metrics_masks = cfg.get_string("paths", "metrics_masks", "");

  out.normalize_mesh = cfg.get_bool("scene", "normalize", out.normalize_mesh);
  out.probe_rotation = cfg.get_float("scene", "probe_rotation", out.probe_rotation);

  out.orbit_frames = cfg.get_int("orbit", "frames", out.orbit_frames);
  out.orbit_elevation = cfg.get_float("orbit", "elevation", out.orbit_elevation);
  out.orbit_radius = cfg.get_float("orbit", "radius", out.orbit_radius);
  out.fov_y = cfg.get_float("orbit", "fov", out.fov_y);
  out.width = cfg.get_int("orbit", "width", out.width);
  out.height = cfg.get_int("orbit", "height", out.height);

  out.render.spp = cfg.get_int("render", "spp", out.render.spp);
  out.render.spp_backward = cfg.get_int("render", "spp_backward", out.render.spp_backward);
  out.render.bounces = cfg.get_int("render", "bounces", out.render.bounces);
  out.render.seed = uint64_t(cfg.get_int64("render", "seed", 0));
  out.render.diffuse_only = cfg.get_bool("render", "diffuse_only", false);
  out.render.workers = cfg.get_int("render", "workers", 0);
  out.render_material = cfg.get_string("render", "material", out.render_material);
  out.const_base_color = cfg.get_vec3("render", "base_color", out.const_base_color);
  out.const_roughness = cfg.get_float("render", "roughness", out.const_roughness);
  out.const_metallic = cfg.get_float("render", "metallic", out.const_metallic);
  out.write_intrinsics = cfg.get_bool("render", "write_intrinsics", out.write_intrinsics);
  out.write_hdr = cfg.get_bool("render", "write_hdr", out.write_hdr);

  out.field.levels = cfg.get_int("field", "levels", out.field.levels);
  out.field.table_size_log2 = cfg.get_int("field", "table_size_log2", out.field.table_size_log2);
  out.field.features = cfg.get_int("field", "features", out.field.features);
  out.field.res_min = cfg.get_int("field", "res_min", out.field.res_min);
  out.field.res_max = cfg.get_int("field", "res_max", out.field.res_max);
  out.field.hidden_width = cfg.get_int("field", "hidden", out.field.hidden_width);
  out.field.hidden_layers = cfg.get_int("field", "hidden_layers", out.field.hidden_layers);
  out.field.seed = uint32_t(cfg.get_int64("field", "seed", 1));

  out.optim.iterations = cfg.get_int("optim", "iterations", out.optim.iterations);
  out.optim.batch = cfg.get_int("optim", "batch", out.optim.batch);
  out.optim.lr_table = cfg.get_float("optim", "lr_table", out.optim.lr_table);
  out.optim.lr_mlp = cfg.get_float("optim", "lr_mlp", out.optim.lr_mlp);
  out.optim.beta1 = cfg.get_float("optim", "beta1", out.optim.beta1);
  out.optim.beta2 = cfg.get_float("optim", "beta2", out.optim.beta2);
  out.optim.epsilon = cfg.get_float("optim", "epsilon", out.optim.epsilon);
  out.optim.lambda = cfg.get_float("optim", "lambda", out.optim.lambda);
  out.optim.checkpoint_every = cfg.get_int("optim", "checkpoint_every", 0);

  out.bake_resolution = cfg.get_int("bake", "resolution", out.bake_resolution);
  out.warp_source_frame = cfg.get_int("warp", "source_frame", 0);
  out.relight_probes = cfg.get_string("relight", "probes", "");
  out.relight_spp = cfg.get_int("relight", "spp", out.relight_spp);
  return out;
}

std::string PipelineConfig::to_ini() const {
  std::ostringstream out;
  char buf[256];
  auto put = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof(buf), fmt, args...);
    out << buf << "\n";
  };
  out << "[paths]\n";
  put("mesh = %s", mesh_path.c_str());
  put("probe = %s", probe_path.c_str());
  put("output = %s", output_dir.c_str());
  put("frames = %s", frames_dir.c_str());
  put("checkpoint = %s", checkpoint_path.c_str());
  put("truth = %s", truth_dir.c_str());
  put("metrics_a = %s", metrics_dir_a.c_str());
  put("metrics_b = %s", metrics_dir_b.c_str());
  put("metrics_masks = %s", metrics_masks.c_str());
  out << "\n[scene]\n";
  put("normalize = %s", normalize_mesh ? "true" : "false");
  put("probe_rotation = %.9g", probe_rotation);
  out << "\n[orbit]\n";
  put("frames = %d", orbit_frames);
  put("elevation = %.9g", orbit_elevation);
  put("radius = %.9g", orbit_radius);
  put("fov = %.9g", fov_y);
  put("width = %d", width);
  put("height = %d", height);
  out << "\n[render]\n";
  put("spp = %d", render.spp);
  put("spp_backward = %d", render.spp_backward);
  put("bounces = %d", render.bounces);
  put("seed = %llu", static_cast<unsigned long long>(render.seed));
  put("diffuse_only = %s", render.diffuse_only ? "true" : "false");
  put("workers = %d", render.workers);
  put("material = %s", render_material.c_str());
  put("base_color = %.9g %.9g %.9g", const_base_color.x, const_base_color.y,
      const_base_color.z);
  put("roughness = %.9g", const_roughness);
  put("metallic = %.9g", const_metallic);
  put("write_intrinsics = %s", write_intrinsics ? "true" : "false");
  put("write_hdr = %s", write_hdr ? "true" : "false");
  out << "\n[field]\n";
  put("levels = %d", field.levels);
  put("table_size_log2 = %d", field.table_size_log2);
  put("features = %d", field.features);
  put("res_min = %d", field.res_min);
  put("res_max = %d", field.res_max);
  put("hidden = %d", field.hidden_width);
  put("hidden_layers = %d", field.hidden_layers);
  put("seed = %u", field.seed);
  out << "\n[optim]\n";
  put("iterations = %d", optim.iterations);
  put("batch = %d", optim.batch);
  put("lr_table = %.9g", optim.lr_table);
  put("lr_mlp = %.9g", optim.lr_mlp);
  put("beta1 = %.9g", optim.beta1);
  put("beta2 = %.9g", optim.beta2);
  put("epsilon = %.9g", optim.epsilon);
  put("lambda = %.9g", optim.lambda);
  put("checkpoint_every = %d", optim.checkpoint_every);
  out << "\n[bake]\n";
  put("resolution = %d", bake_resolution);
  out << "\n[warp]\n";
  put("source_frame = %d", warp_source_frame);
  out << "\n[relight]\n";
  put("probes = %s", relight_probes.c_str());
  put("spp = %d", relight_spp);
  return out.str();
}

namespace {

Scene load_scene(const PipelineConfig& cfg) {
  require(!cfg.mesh_path.empty(), "[paths] mesh");
  TriangleMesh mesh = load_mesh(cfg.mesh_path);
  if (cfg.normalize_mesh) mesh.normalize_to_unit_box();
  return Scene(std::move(mesh));
}

EnvironmentProbe load_scene_probe(const PipelineConfig& cfg) {
  require(!cfg.probe_path.empty(), "[paths] probe");
  return load_probe(cfg.probe_path, cfg.probe_rotation);
}

std::vector<Camera> make_orbit(const PipelineConfig& cfg, const Scene& scene) {
  return generate_orbit(cfg.orbit_frames, scene.mesh.bounds.center(), cfg.orbit_elevation,
                        cfg.orbit_radius, cfg.fov_y, cfg.width, cfg.height);
}

std::unique_ptr<MaterialSource> make_render_material(const PipelineConfig& cfg,
                                                     std::unique_ptr<MaterialField>& field_out) {
  if (cfg.render_material == "checker") return std::make_unique<CheckerMaterial>();
  if (cfg.render_material == "constant") {
    PbrSample s;
    s.base_color = cfg.const_base_color;
    s.roughness = cfg.const_roughness;
    s.metallic = cfg.const_metallic;
    return std::make_unique<ConstantMaterial>(s);
  }
  if (cfg.render_material == "checkpoint") {
    require(!cfg.checkpoint_path.empty(), "[paths] checkpoint");
    field_out = std::make_unique<MaterialField>(MaterialField::load(cfg.checkpoint_path));
    return std::make_unique<FieldMaterial>(*field_out);
  }
  throw ConfigError("unknown [render] material '" + cfg.render_material +
                    "' (expected constant, checker or checkpoint)");
}

void echo_config(const PipelineConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  std::ofstream out(fs::path(cfg.output_dir) / "config_resolved.ini", std::ios::binary);
  out << cfg.to_ini();
}

Image binary_mask_from_coverage(const Image& coverage) {
  Image mask(coverage.width, coverage.height, 1);
  for (size_t i = 0; i < coverage.data.size(); ++i)
    mask.data[i] = coverage.data[i] > 0.5f ? 1.0f : 0.0f;
  return mask;
}

// render subcommand: write a FrameSet (frames, masks, cameras, optional
// intrinsic guides) that reconstruct can consume directly.
void run_render(const PipelineConfig& cfg) {
  Scene scene = load_scene(cfg);
  EnvironmentProbe probe = load_scene_probe(cfg);
  std::vector<Camera> cams = make_orbit(cfg, scene);

  std::unique_ptr<MaterialField> field;
  std::unique_ptr<MaterialSource> material = make_render_material(cfg, field);

  fs::path root = cfg.frames_dir.empty() ? fs::path(cfg.output_dir) / "frameset"
                                         : fs::path(cfg.frames_dir);
  fs::create_directories(root / "frames");
  fs::create_directories(root / "masks");
  if (cfg.write_hdr) fs::create_directories(root / "hdr");
  if (cfg.write_intrinsics) {
    fs::create_directories(root / "guides" / "basecolor");
    fs::create_directories(root / "guides" / "roughness");
    fs::create_directories(root / "guides" / "metallic");
  }
  save_cameras((root / "cameras.txt").string(), cams);

  for (size_t i = 0; i < cams.size(); ++i) {
    RenderConfig rc = cfg.render;
    rc.seed = hash_combine(cfg.render.seed, uint64_t(i));
    RenderedImage img = render(scene, probe, *material, cams[i], rc);
    write_png8((root / "frames" / frame_name(i)).string(), tonemap_image(img.rgb));
    write_png8((root / "masks" / frame_name(i)).string(),
               binary_mask_from_coverage(img.coverage));
    if (cfg.write_hdr) write_f32((root / "hdr" / frame_name(i, "", ".f32")).string(), img.rgb);

    if (cfg.write_intrinsics) {
      // Ground-truth intrinsic frames from the same material: base color in
      // display space, roughness/metallic linear, one center sample each.
      Image base(cfg.width, cfg.height, 3), rough(cfg.width, cfg.height, 1),
          metal(cfg.width, cfg.height, 1);
      for (int y = 0; y < cfg.height; ++y)
        for (int x = 0; x < cfg.width; ++x) {
          Ray ray;
          ray.origin = cams[i].origin();
          ray.dir = cams[i].ray_direction(float(x) + 0.5f, float(y) + 0.5f);
          auto hit = scene.intersect(ray);
          if (!hit) continue;
          ShadePoint sp = shade_point_from(*hit, scene.mesh, ray);
          PbrSample s = material->sample_at(sp.position, sp.uv);
          base.set_rgb(x, y,
                       Vec3f{linear_to_srgb(saturate(s.base_color.x)),
                             linear_to_srgb(saturate(s.base_color.y)),
                             linear_to_srgb(saturate(s.base_color.z))});
          rough.pixel(x, y)[0] = s.roughness;
          metal.pixel(x, y)[0] = s.metallic;
        }
      write_png8((root / "guides" / "basecolor" / frame_name(i)).string(), base);
      write_png8((root / "guides" / "roughness" / frame_name(i)).string(), rough);
      write_png8((root / "guides" / "metallic" / frame_name(i)).string(), metal);
    }
  }
}

void run_guides(const PipelineConfig& cfg) {
  Scene scene = load_scene(cfg);
  EnvironmentProbe probe = load_scene_probe(cfg);
  std::vector<Camera> cams = make_orbit(cfg, scene);

  fs::path dir = fs::path(cfg.output_dir) / "guides";
  fs::create_directories(dir);
  for (size_t i = 0; i < cams.size(); ++i) {
    RenderConfig rc = cfg.render;
    rc.seed = hash_combine(cfg.render.seed, uint64_t(i));
    Image normal = render_normal_guide(scene, cams[i], rc.workers);
    Image shading = render_shading_guide(scene, probe, cams[i], rc);
    write_png8((dir / frame_name(i, "_normal")).string(), normal);
    write_png8((dir / frame_name(i, "_shading")).string(), shading);
  }
}

void run_reconstruct(const PipelineConfig& cfg) {
  require(!cfg.frames_dir.empty(), "[paths] frames");
  Scene scene = load_scene(cfg);
  EnvironmentProbe probe = load_scene_probe(cfg);
  FrameSet frameset = load_frameset(cfg.frames_dir);

  OptimSettings optim = cfg.optim;
  optim.render = cfg.render;
  optim.seed = cfg.render.seed;
  if (optim.checkpoint_every > 0)
    optim.checkpoint_dir = (fs::path(cfg.output_dir) / "checkpoints").string();

  ReconResult result = reconstruct(frameset, scene, probe, cfg.field, optim);

  fs::path out(cfg.output_dir);
  fs::create_directories(out);
  std::string checkpoint = cfg.checkpoint_path.empty() ? (out / "field.bin").string()
                                                       : cfg.checkpoint_path;
  fs::create_directories(fs::path(checkpoint).parent_path().empty()
                             ? fs::path(".")
                             : fs::path(checkpoint).parent_path());
  result.field.save(checkpoint);
  save_loss_history((out / "loss_history.csv").string(), result.history);

  BakedTextures baked = bake_textures(result.field, scene.mesh, cfg.bake_resolution);
  save_baked_textures(baked, (out / "textures").string());
}

void run_bake(const PipelineConfig& cfg) {
  require(!cfg.checkpoint_path.empty(), "[paths] checkpoint");
  Scene scene = load_scene(cfg);
  MaterialField field = MaterialField::load(cfg.checkpoint_path);
  BakedTextures baked = bake_textures(field, scene.mesh, cfg.bake_resolution);
  save_baked_textures(baked, (fs::path(cfg.output_dir) / "textures").string());
}

void run_relight(const PipelineConfig& cfg) {
  require(!cfg.checkpoint_path.empty(), "[paths] checkpoint");
  require(!cfg.relight_probes.empty(), "[relight] probes");
  Scene scene = load_scene(cfg);
  MaterialField field = MaterialField::load(cfg.checkpoint_path);
  BakedTextures baked = bake_textures(field, scene.mesh, cfg.bake_resolution);
  TextureMaterial material(baked);
  std::vector<Camera> cams = make_orbit(cfg, scene);

  std::vector<EnvironmentProbe> probes;
  std::vector<std::string> names;
  std::istringstream list(cfg.relight_probes);
  std::string item;
  while (std::getline(list, item, ';')) {
    if (item.empty()) continue;
    probes.push_back(load_probe(item, cfg.probe_rotation));
    names.push_back(fs::path(item).stem().string());
  }
  if (probes.empty()) throw ConfigError("[relight] probes resolved to an empty list");

  RenderConfig rc = cfg.render;
  rc.spp = cfg.relight_spp;

  fs::path out(cfg.output_dir);
  std::vector<Image> truth;
  std::vector<Image> masks;
  bool have_truth = !cfg.truth_dir.empty();
  for (size_t p = 0; p < probes.size(); ++p) {
    fs::path dir = out / "relight" / names[p];
    fs::create_directories(dir);
    for (size_t c = 0; c < cams.size(); ++c) {
      RenderConfig frame_rc = rc;
      frame_rc.seed = hash_combine(rc.seed, hash_combine(p, c));
      RenderedImage img = render(scene, probes[p], material, cams[c], frame_rc);
      Image display = tonemap_image(img.rgb);
      write_png8((dir / frame_name(c)).string(), display);
      if (p == 0) masks.push_back(binary_mask_from_coverage(img.coverage));
      if (have_truth) {
        fs::path ref = fs::path(cfg.truth_dir) / names[p] / frame_name(c);
        if (!fs::exists(ref)) throw IoError(ref.string() + ": missing truth frame");
        truth.push_back(read_png(ref.string()));
      }
    }
  }
  if (have_truth) {
    // Score from the just-written frames (re-read keeps comparisons in the
    // same quantized display space as the truth files).
    std::vector<RelightRow> rows;
    for (size_t p = 0; p < probes.size(); ++p) {
      double sum_sq = 0.0;
      int64_t count = 0;
      for (size_t c = 0; c < cams.size(); ++c) {
        Image ours = read_png((out / "relight" / names[p] / frame_name(c)).string());
        const Image& ref = truth[p * cams.size() + c];
        if (ref.width != ours.width || ref.height != ours.height)
          throw IoError("truth frame resolution mismatch for probe " + names[p]);
        for (int y = 0; y < ours.height; ++y)
          for (int x = 0; x < ours.width; ++x) {
            if (masks[c].pixel(x, y)[0] <= 0.5f) continue;
            Vec3f d = ours.rgb(x, y) - ref.rgb(x, y);
            sum_sq += double(d.x) * d.x + double(d.y) * d.y + double(d.z) * d.z;
            count += 3;
          }
      }
      RelightRow row;
      row.probe_name = names[p];
      double mse = count > 0 ? sum_sq / double(count) : 0.0;
      row.psnr_db = mse == 0.0 ? std::numeric_limits<double>::infinity()
                               : 10.0 * std::log10(1.0 / mse);
      rows.push_back(row);
    }
    save_relight_table((out / "relight.csv").string(), rows);
  }
}

void run_metrics(const PipelineConfig& cfg) {
  require(!cfg.metrics_dir_a.empty(), "[paths] metrics_a");
  require(!cfg.metrics_dir_b.empty(), "[paths] metrics_b");

  fs::path out(cfg.output_dir);
  fs::create_directories(out);
  std::ofstream csv(out / "metrics.csv", std::ios::binary);
  csv << "frame,psnr_db\n";

  double sum = 0.0;
  int n = 0;
  char buf[128];
  for (size_t i = 0;; ++i) {
    fs::path a = fs::path(cfg.metrics_dir_a) / frame_name(i);
    fs::path b = fs::path(cfg.metrics_dir_b) / frame_name(i);
    if (!fs::exists(a) || !fs::exists(b)) break;
    Image ia = read_png(a.string());
    Image ib = read_png(b.string());
    Image mask;
    if (!cfg.metrics_masks.empty()) {
      fs::path m = fs::path(cfg.metrics_masks) / frame_name(i);
      if (!fs::exists(m)) throw IoError(m.string() + ": missing mask");
      mask = read_png(m.string());
    }
    double db = mask.width > 0 ? psnr(ia, ib, mask) : psnr(ia, ib);
    if (std::isinf(db)) {
      csv << i << ",inf\n";
    } else {
      std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", i, db);
      csv << buf;
    }
    sum += db;
    ++n;
  }
  if (n == 0) throw IoError("metrics: no frame pairs found");
  if (std::isinf(sum)) {
    csv << "mean,inf\n";
  } else {
    std::snprintf(buf, sizeof(buf), "mean,%.9g\n", sum / n);
    csv << buf;
  }
}

void run_warp(const PipelineConfig& cfg) {
  require(!cfg.frames_dir.empty(), "[paths] frames");
  Scene scene = load_scene(cfg);
  fs::path root(cfg.frames_dir);
  std::vector<Camera> cams = load_cameras((root / "cameras.txt").string());
  if (cfg.warp_source_frame < 0 || size_t(cfg.warp_source_frame) >= cams.size())
    throw ConfigError("[warp] source_frame out of range");

  fs::path src_path = root / "frames" / frame_name(size_t(cfg.warp_source_frame));
  if (!fs::exists(src_path)) throw IoError(src_path.string() + ": missing source frame");
  Image src = read_png(src_path.string());

  const Camera& src_cam = cams[size_t(cfg.warp_source_frame)];
  Image depth = render_depth(scene, src_cam, cfg.render.workers);

  fs::path out = fs::path(cfg.output_dir);
  fs::create_directories(out / "warped");
  fs::create_directories(out / "warp_masks");
  write_f32((out / "source_depth.f32").string(), depth);

  for (size_t i = 0; i < cams.size(); ++i) {
    WarpResult wr = warp_image(src, depth, src_cam, cams[i]);
    write_png8((out / "warped" / frame_name(i)).string(), wr.rgb);
    write_png8((out / "warp_masks" / frame_name(i)).string(), wr.mask);
  }
}

}  // namespace

void run_pipeline(const PipelineConfig& cfg, const std::string& subcommand) {
  echo_config(cfg);
  if (subcommand == "render") run_render(cfg);
  else if (subcommand == "guides") run_guides(cfg);
  else if (subcommand == "reconstruct") run_reconstruct(cfg);
  else if (subcommand == "bake") run_bake(cfg);
  else if (subcommand == "relight") run_relight(cfg);
  else if (subcommand == "metrics") run_metrics(cfg);
  else if (subcommand == "warp") run_warp(cfg);
  else throw ConfigError("unknown subcommand '" + subcommand + "'");
}

}  // namespace matbake
