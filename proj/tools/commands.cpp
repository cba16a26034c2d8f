#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "lumigeo/diffusion.hpp"
#include "lumigeo/envmap.hpp"
#include "lumigeo/error.hpp"
#include "lumigeo/eval.hpp"
#include "lumigeo/inod.hpp"
#include "lumigeo/io.hpp"
#include "lumigeo/latent.hpp"
#include "lumigeo/synthetic.hpp"

namespace lumigeo::cli {
namespace fs = std::filesystem;

json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string output_path(const std::string& path) {
  const char* dir = std::getenv("LUMIGEO_OUTPUT_DIR");
  if (path.empty() || !dir || !*dir || fs::path(path).is_absolute()) return path;
  return (fs::path(dir) / path).string();
}

namespace {

std::string lower_ext(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

ImageF read_image(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".pfm") return io::read_pfm(path);
  if (ext == ".hdr") return io::read_hdr(path);
  fail(ErrorCode::kInvalidInput, "unsupported image type '" + ext + "' (expected .pfm or .hdr)");
}

void write_image(const std::string& path, const ImageF& image) {
  const std::string ext = lower_ext(path);
  if (ext == ".pfm") return io::write_pfm(path, image);
  if (ext == ".hdr") return io::write_hdr(path, image);
  if (ext == ".png") return io::write_png(path, image);
  fail(ErrorCode::kInvalidInput, "unsupported image type '" + ext + "' (expected .pfm, .hdr or .png)");
}

std::string sibling(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    fail(ErrorCode::kInvalidInput, "size must look like WxH, got '" + text + "'");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

latent::ModalitySet parse_modality_set(const std::string& text) {
  latent::ModalitySet set{};
  if (text == "none") return set;
  for (const auto& name : split_list(text)) set[latent::ordinal(latent::parse_modality(name))] = true;
  return set;
}

json modality_names(const latent::ModalitySet& set) {
  json arr = json::array();
  for (auto m : latent::kAllModalities) {
    if (set[latent::ordinal(m)]) arr.push_back(std::string(latent::to_string(m)));
  }
  return arr;
}

json ok(const std::string& command) { return {{"command", command}, {"status", "ok"}}; }

void write_report(const std::string& path, const json& result) {
  if (!path.empty()) io::write_json(output_path(path), result);
}

// ---- iNOD ----------------------------------------------------------------

json inod_meta(const inod::INodMap& map, const inod::NormalizationRecord& record, int radius) {
  json meta = {{"width", map.width()},
               {"height", map.height()},
               {"normalization", io::to_json(record)},
               {"dilation_radius", radius}};
  if (map.grid) meta["grid"] = io::to_json(*map.grid);
  return meta;
}

inod::INodMap load_map(const std::string& map_path, const std::string& mask_path) {
  const ImageF values = io::read_pfm(map_path);
  if (values.channels() != 1) fail(ErrorCode::kInvalidInput, "iNOD map must be single-channel");
  inod::INodMap map(values.width(), values.height());
  map.values = values;
  map.mask = io::read_pgm_mask(mask_path);
  require_same_shape(map.values, map.mask, "iNOD mask");
  return map;
}

std::optional<json> load_meta(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return io::read_json(path);
}

inod::DepthMap load_depth(const std::string& depth, const std::string& mask) {
  return io::read_depth(depth, mask.empty() ? fs::path{} : fs::path(mask));
}

std::uint64_t fnv1a(std::span<const float> data) {
  std::uint64_t h = 1469598103934665603ull;
  for (float f : data) {
    const auto bits = std::bit_cast<std::uint32_t>(f);
    for (int i = 0; i < 4; ++i) {
      h ^= (bits >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

// ---- latents --------------------------------------------------------------

std::vector<latent::LatentTensor> read_latents(const std::string& spec) {
  const auto files = split_list(spec);
  std::vector<latent::LatentTensor> out;
  if (files.size() == static_cast<std::size_t>(latent::kModalityCount)) {
    for (const auto& f : files) out.push_back(to_raster(io::read_tensor(f)));
    return out;
  }
  if (files.size() != 1) fail(ErrorCode::kInvalidInput, "--latents takes one rank-4 file or five rank-3 files");
  const Tensor t = io::read_tensor(files.front());
  if (t.shape.size() != 4 || t.shape[0] != latent::kModalityCount) {
    fail(ErrorCode::kInvalidInput, "latent stack must have shape [5, H, W, C]");
  }
  const std::size_t per = t.data.size() / latent::kModalityCount;
  for (int m = 0; m < latent::kModalityCount; ++m) {
    Tensor one{{t.shape[1], t.shape[2], t.shape[3]},
               std::vector<float>(t.data.begin() + static_cast<std::ptrdiff_t>(m * per),
                                  t.data.begin() + static_cast<std::ptrdiff_t>((m + 1) * per))};
    out.push_back(to_raster(one));
  }
  return out;
}

Tensor stack_latents(const std::vector<latent::LatentTensor>& latents) {
  const auto& first = latents.front();
  Tensor t{{static_cast<std::uint32_t>(latents.size()), static_cast<std::uint32_t>(first.height()),
            static_cast<std::uint32_t>(first.width()), static_cast<std::uint32_t>(first.channels())},
           {}};
  for (const auto& l : latents) {
    t.data.insert(t.data.end(), l.data().begin(), l.data().end());
  }
  return t;
}

latent::Conditions read_conditions(const std::string& global, const std::string& illumination) {
  latent::Conditions c;
  if (!global.empty()) c.global = to_raster(io::read_tensor(global));
  if (!illumination.empty()) {
    const auto files = split_list(illumination);
    if (files.size() == 1) {
      c.illumination = to_raster(io::read_tensor(files[0]));
    } else if (files.size() == 3) {
      c.illumination = latent::concat_illumination(to_raster(io::read_tensor(files[0])),
                                                   to_raster(io::read_tensor(files[1])),
                                                   to_raster(io::read_tensor(files[2])));
    } else {
      fail(ErrorCode::kInvalidInput, "--illum takes one 48-channel file or three 16-channel files");
    }
  }
  return c;
}

latent::ModalityTypeTable read_table(const std::string& path) {
  if (path.empty()) return {};
  return io::modality_table_from_json(io::read_json(path));
}

struct Plan {
  latent::ModalitySet clear{};
  latent::Conditions conditions;
  json mode = nullptr;
};

// The mode row decides clear set and conditions; --clear overrides the set.
Plan plan(const std::string& mode, const std::string& dataset, const std::string& clear,
          latent::Conditions available) {
  Plan p;
  p.conditions = std::move(available);
  if (!mode.empty()) {
    const auto m = latent::parse_training_mode(mode);
    const auto spec = dataset.empty() ? latent::training_mode_row(m)
                                      : latent::dispatch_mode(m, latent::parse_dataset(dataset));
    p.clear = latent::switch_bits(spec);
    p.conditions = latent::conditions_for(spec, std::move(p.conditions));
    p.mode = io::to_json(spec);
  } else if (!dataset.empty()) {
    fail(ErrorCode::kInvalidInput, "--dataset needs --mode");
  }
  if (!clear.empty()) p.clear = parse_modality_set(clear);
  return p;
}

// ---- bench ----------------------------------------------------------------

struct CorpusEntry {
  std::string name;
  inod::DepthMap depth;
  inod::IntrinsicsMatrix intrinsics;
};

std::vector<CorpusEntry> read_corpus(const std::string& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kIo, dir + ": not a directory");
  std::vector<fs::path> depths;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".pfm") depths.push_back(e.path());
  }
  std::sort(depths.begin(), depths.end());
  std::vector<CorpusEntry> out;
  for (const auto& p : depths) {
    fs::path k = p, mask = p;
    k.replace_extension(".json");
    mask.replace_extension(".pgm");
    out.push_back({p.stem().string(), io::read_depth(p, fs::exists(mask) ? mask : fs::path{}),
                   io::intrinsics_from_json(io::read_json(k))});
  }
  if (out.empty()) fail(ErrorCode::kEmptyInput, dir + ": no depth maps (*.pfm) found");
  return out;
}

void write_scene(const fs::path& depth_path, const inod::DepthMap& depth, const inod::IntrinsicsMatrix& k,
                 const fs::path& mask_path, const fs::path& k_path) {
  ImageF values(depth.width(), depth.height());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values.storage()[i] = depth.mask.storage()[i] ? static_cast<float>(depth.values.storage()[i]) : 0.0f;
  }
  io::write_pfm(depth_path, values);
  io::write_pgm_mask(mask_path, depth.mask);
  io::write_json(k_path, io::to_json(k));
}

}  // namespace

// ---------------------------------------------------------------------------

json inod_encode(const InodEncodeOptions& o) {
  const auto depth = load_depth(o.depth, o.mask);
  const auto k = io::intrinsics_from_json(io::read_json(o.intrinsics));
  if (o.dilate < 0) fail(ErrorCode::kInvalidInput, "--dilate must be >= 0");
  auto enc = inod::encode(depth, k);
  inod::INodMap map = o.dilate > 0 ? inod::dilate_foreground(enc.map, o.dilate) : enc.map;

  const std::string out = output_path(o.out);
  const std::string mask_out = output_path(o.out_mask.empty() ? sibling(o.out, ".mask.pgm") : o.out_mask);
  const std::string meta_out = output_path(o.meta.empty() ? sibling(o.out, ".json") : o.meta);
  io::write_pfm(out, map.values);
  io::write_pgm_mask(mask_out, map.mask);
  const json meta = inod_meta(map, enc.record, o.dilate);
  io::write_json(meta_out, meta);

  json r = ok("inod encode");
  r["points"] = enc.normalized.size();
  r["foreground_pixels"] = count_set(map.mask);
  r["dilated_pixels"] = count_set(map.dilated_mask);
  r["normalization"] = meta["normalization"];
  r["outputs"] = {{"map", out}, {"mask", mask_out}, {"meta", meta_out}};
  return r;
}

json inod_decode(const InodDecodeOptions& o) {
  inod::INodMap raw = load_map(o.map, o.mask);
  inod::INodMap map = inod::cutoff(raw, raw.mask);
  const auto meta = load_meta(o.meta);
  if (meta && meta->contains("grid")) map.grid = io::grid_from_json((*meta)["grid"]);
  PointCloud cloud = inod::unproject_orthographic(map);
  if (o.metric) {
    if (!meta || !meta->contains("normalization")) {
      fail(ErrorCode::kInvalidInput, "--metric needs --meta with a normalization record");
    }
    const auto rec = io::normalization_from_json((*meta)["normalization"]);
    for (auto& p : cloud.points) p = p * rec.max_edge + rec.center;
  }
  const std::string out = output_path(o.out);
  io::write_ply(out, cloud);
  json r = ok("inod decode");
  r["points"] = cloud.size();
  r["grid_source"] = map.grid ? "metadata" : "footprint";
  r["metric"] = o.metric;
  r["outputs"] = {{"cloud", out}};
  return r;
}

json inod_dilate(const InodDilateOptions& o) {
  inod::INodMap map = load_map(o.map, o.mask);
  const auto meta = load_meta(o.meta);
  if (meta && meta->contains("grid")) map.grid = io::grid_from_json((*meta)["grid"]);
  inod::validate(map);
  if (o.radius < 0) fail(ErrorCode::kInvalidInput, "--radius must be >= 0");
  const inod::INodMap dilated = inod::dilate_foreground(map, o.radius);
  const std::string out = output_path(o.out);
  const std::string dil_out = output_path(o.out_dilated.empty() ? sibling(o.out, ".dilated.pgm") : o.out_dilated);
  io::write_pfm(out, dilated.values);
  io::write_pgm_mask(dil_out, dilated.dilated_mask);
  json r = ok("inod dilate");
  r["radius"] = o.radius;
  r["foreground_pixels"] = count_set(dilated.mask);
  r["dilated_pixels"] = count_set(dilated.dilated_mask);
  r["outputs"] = {{"map", out}, {"dilated_mask", dil_out}};
  return r;
}

json inod_roundtrip(const InodRoundtripOptions& o) {
  const auto depth = load_depth(o.depth, o.mask);
  const auto k = io::intrinsics_from_json(io::read_json(o.intrinsics));
  const auto enc = inod::encode(depth, k);
  const PointCloud rec = inod::unproject_orthographic(enc.map);
  Vec3 worst = Vec3::Zero();
  double sum = 0.0;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const Vec3 d = (rec.points[i] - enc.normalized.points[i]).cwiseAbs();
    worst = worst.cwiseMax(d);
    sum += d.maxCoeff();
  }
  json r = ok("inod roundtrip");
  r["points"] = rec.size();
  r["max_error"] = worst.maxCoeff();
  r["max_error_xyz"] = {worst.x(), worst.y(), worst.z()};
  r["mean_error"] = sum / static_cast<double>(rec.size());
  r["normalization"] = io::to_json(enc.record);
  write_report(o.out, r);
  return r;
}

json envmap_decompose(const EnvDecomposeOptions& o) {
  const envmap::HdrEnvMap env(read_image(o.hdr));
  const auto triple = envmap::decompose(env);
  const fs::path dir = output_path(o.out_dir);
  json outputs = json::object();
  auto emit = [&](const char* name, const ImageF& img) {
    const fs::path pfm = dir / (std::string(name) + ".pfm");
    const fs::path png = dir / (std::string(name) + ".png");
    io::write_pfm(pfm, img);
    io::write_png(png, img);
    outputs[name] = {{"pfm", pfm.string()}, {"png", png.string()}};
  };
  emit("ldr", triple.tonemapped);
  emit("log", triple.log_intensity);
  emit("dir", triple.direction);
  double y_max = 0.0;
  for (int y = 0; y < env.height(); ++y) {
    for (int x = 0; x < env.width(); ++x) y_max = std::max(y_max, envmap::luminance(env(x, y, 0), env(x, y, 1), env(x, y, 2)));
  }
  json r = ok("envmap decompose");
  r["width"] = env.width();
  r["height"] = env.height();
  r["luminance_max"] = y_max;
  r["outputs"] = outputs;
  return r;
}

json envmap_rotate(const EnvRotateOptions& o) {
  const envmap::HdrEnvMap env(read_image(o.hdr));
  const auto rotated = envmap::rotate(env, o.yaw);
  const std::string out = output_path(o.out);
  write_image(out, rotated.radiance());
  json r = ok("envmap rotate");
  r["yaw"] = o.yaw;
  r["energy_in"] = env.total_energy();
  r["energy_out"] = rotated.total_energy();
  r["outputs"] = {{"hdr", out}};
  return r;
}

json envmap_scale(const EnvScaleOptions& o) {
  const envmap::HdrEnvMap env(read_image(o.hdr));
  const auto scaled = envmap::scale_intensity(env, o.factor);
  const std::string out = output_path(o.out);
  write_image(out, scaled.radiance());
  json r = ok("envmap scale");
  r["factor"] = o.factor;
  r["energy_in"] = env.total_energy();
  r["energy_out"] = scaled.total_energy();
  r["outputs"] = {{"hdr", out}};
  return r;
}

json envmap_from_leds(const EnvFromLedsOptions& o) {
  const auto leds = io::leds_from_json(io::read_json(o.leds));
  const auto [w, h] = parse_size(o.size);
  const auto env = envmap::leds_to_equirect(leds, w, h, o.splat_radius);
  const std::string out = output_path(o.out);
  write_image(out, env.radiance());
  json r = ok("envmap from-leds");
  r["led_count"] = leds.size();
  r["width"] = w;
  r["height"] = h;
  r["splat_radius"] = o.splat_radius;
  r["total_energy"] = env.total_energy();
  r["outputs"] = {{"hdr", out}};
  return r;
}

json assemble(const AssembleOptions& o) {
  const auto latents = read_latents(o.latents);
  const Plan p = plan(o.mode, o.dataset, o.clear, read_conditions(o.global, o.illumination));
  const auto stack = latent::assemble_stack(latents, p.conditions, p.clear, read_table(o.table));
  const std::string out = output_path(o.out);
  io::write_tensor(out, stack.to_tensor());
  json r = ok("assemble");
  r["shape"] = {latent::kModalityCount, stack.height(), stack.width(), latent::kStackChannels};
  r["clear"] = modality_names(p.clear);
  r["global_condition"] = p.conditions.global.has_value();
  r["illumination_condition"] = p.conditions.illumination.has_value();
  r["mode"] = p.mode;
  r["outputs"] = {{"stack", out}};
  return r;
}

json sample(const SampleOptions& o) {
  const auto schedule = o.schedule.empty()
                            ? diffusion::NoiseSchedule::karras(o.steps, o.sigma_min, o.sigma_max, o.rho)
                            : io::schedule_from_json(io::read_json(o.schedule));
  const Plan p = plan(o.mode, o.dataset, o.clear, read_conditions(o.global, o.illumination));

  std::vector<latent::LatentTensor> clean(latent::kModalityCount);
  int h = 0, w = 0;
  if (!o.latents.empty()) {
    clean = read_latents(o.latents);
    h = clean.front().height();
    w = clean.front().width();
  } else {
    if (std::any_of(p.clear.begin(), p.clear.end(), [](bool b) { return b; })) {
      fail(ErrorCode::kInvalidInput, "clear modalities need --latents");
    }
    if (o.latent_size.empty()) fail(ErrorCode::kInvalidInput, "give --latents or --latent-size WxH");
    std::tie(w, h) = parse_size(o.latent_size);
  }

  diffusion::Denoiser denoiser;
  if (o.denoiser == "identity" || o.denoiser == "shrink") {
    const bool shrink = o.denoiser == "shrink";
    denoiser = [shrink](const latent::ModalityStack& stack, double sigma) {
      // Posterior mean for unit-variance Gaussian data when shrinking.
      const float gain = shrink ? static_cast<float>(1.0 / (1.0 + sigma * sigma)) : 1.0f;
      std::vector<latent::LatentTensor> out;
      for (int m = 0; m < latent::kModalityCount; ++m) {
        latent::LatentTensor t(stack.width(), stack.height(), latent::kLatentChannels);
        for (int y = 0; y < stack.height(); ++y) {
          for (int x = 0; x < stack.width(); ++x) {
            for (int c = 0; c < latent::kLatentChannels; ++c) {
              t(x, y, c) = gain * stack.at(m, y, x, latent::kLatentOffset + c);
            }
          }
        }
        out.push_back(std::move(t));
      }
      return out;
    };
  } else {
    fail(ErrorCode::kInvalidInput, "unknown denoiser '" + o.denoiser + "' (identity|shrink)");
  }

  diffusion::SamplerOptions options;
  options.table = read_table(o.table);
  auto initial = diffusion::initial_latents(clean, p.clear, o.seed, schedule.initial(), h, w);
  const auto result = diffusion::sample(std::move(initial), p.clear, p.conditions, schedule, denoiser, options);
  const Tensor t = stack_latents(result);
  const std::string out = output_path(o.out);
  io::write_tensor(out, t);

  json r = ok("sample");
  r["steps"] = schedule.steps();
  r["seed"] = o.seed;
  r["sigma_max"] = schedule.initial();
  r["denoiser"] = o.denoiser;
  r["clear"] = modality_names(p.clear);
  r["mode"] = p.mode;
  r["shape"] = t.shape;
  r["checksum"] = hex(fnv1a(t.data));
  r["outputs"] = {{"latents", out}};
  return r;
}

json eval_geometry(const EvalGeometryOptions& o) {
  const PointCloud pred = io::read_ply(o.pred);
  const PointCloud gt = io::read_ply(o.gt);
  const auto ev = eval::evaluate_geometry(pred, gt, o.threshold, o.icp_iters, o.icp_tol);
  const auto& g = ev.report;
  json r = ok("eval geometry");
  r["accuracy"] = g.accuracy;
  r["completeness"] = g.completeness;
  r["chamfer"] = g.chamfer;
  r["precision"] = g.precision;
  r["recall"] = g.recall;
  r["f_score"] = g.f_score;
  r["params"] = {{"threshold", o.threshold},
                 {"chamfer_convention", eval::kChamferConvention},
                 {"distance_scale", eval::kReportDistanceScale},
                 {"icp", {{"iters", o.icp_iters}, {"tol", o.icp_tol}}}};
  r["icp"] = {{"iterations", ev.icp.iterations},
              {"converged", ev.icp.converged},
              {"final_rms", ev.icp.rms_history.empty() ? 0.0 : ev.icp.rms_history.back()}};
  write_report(o.out, r);
  return r;
}

json eval_relight(const EvalRelightOptions& o) {
  const ImageF pred = read_image(o.pred);
  const ImageF gt = read_image(o.gt);
  Mask mask = o.mask.empty() ? Mask(gt.width(), gt.height(), 1, 1) : io::read_pgm_mask(o.mask);
  const auto pair = o.no_align ? eval::unaligned(pred, gt, mask) : eval::chromatic_align(pred, gt, mask);
  const auto m = eval::image_metrics(pair);
  json r = ok("eval relight");
  r["psnr"] = number(m.psnr);
  r["rmse"] = m.rmse;
  r["ssim"] = number(m.ssim);
  r["aligned"] = !o.no_align;
  r["scale"] = pair.scale;
  r["degenerate_channels"] = pair.degenerate;
  r["params"] = {{"psnr_peak", 1.0}, {"ssim_window", 11}, {"ssim_sigma", 1.5}};
  write_report(o.out, r);
  return r;
}

json eval_normal(const EvalNormalOptions& o) {
  ImageF pred = read_image(o.pred);
  ImageF gt = read_image(o.gt);
  if (o.unit_encoded) {
    for (auto* img : {&pred, &gt}) {
      for (auto& v : img->storage()) v = 2.0f * v - 1.0f;
    }
  }
  Mask mask = o.mask.empty() ? Mask(gt.width(), gt.height(), 1, 1) : io::read_pgm_mask(o.mask);
  const auto e = eval::normal_error(pred, gt, mask);
  json r = ok("eval normal");
  r["mean_angle_deg"] = e.mean_angle_deg;
  r["rmse"] = e.rmse;
  r["pixels"] = count_set(mask);
  write_report(o.out, r);
  return r;
}

json bench_dilation(const BenchDilationOptions& o) {
  if (o.corpus.empty() == (o.generate <= 0)) {
    fail(ErrorCode::kInvalidInput, "give exactly one of --corpus DIR or --generate N");
  }
  std::vector<CorpusEntry> corpus;
  if (!o.corpus.empty()) {
    corpus = read_corpus(o.corpus);
  } else {
    auto scenes = synthetic::scene_corpus(o.seed, o.generate, {});
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      std::ostringstream name;
      name << "shape" << std::setw(3) << std::setfill('0') << i << '_' << synthetic::to_string(scenes[i].shape.kind);
      corpus.push_back({name.str(), std::move(scenes[i].depth), scenes[i].intrinsics});
    }
  }
  if (!o.save_corpus.empty()) {
    const fs::path dir = output_path(o.save_corpus);
    for (const auto& c : corpus) {
      write_scene(dir / (c.name + ".pfm"), c.depth, c.intrinsics, dir / (c.name + ".pgm"), dir / (c.name + ".json"));
    }
  }

  json shapes = json::array();
  std::vector<double> relative;
  std::size_t improved = 0;
  for (const auto& c : corpus) {
    const auto enc = inod::encode(c.depth, c.intrinsics);
    const auto trial = diffusion::dilation_trial(enc.map, o.radius, o.band);
    const double rel = trial.plain_error > 0.0 ? 1.0 - trial.dilated_error / trial.plain_error : 0.0;
    if (trial.dilated_error < trial.plain_error) ++improved;
    relative.push_back(rel);
    shapes.push_back({{"name", c.name},
                      {"band_pixels", trial.band_pixels},
                      {"plain_error", trial.plain_error},
                      {"dilated_error", trial.dilated_error},
                      {"relative_improvement", rel}});
  }
  std::vector<double> sorted = relative;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  json r = ok("bench dilation");
  r["radius"] = o.radius;
  r["band_width"] = o.band;
  r["count"] = n;
  r["improved"] = improved;
  r["all_improved"] = improved == n;
  r["median_relative_improvement"] = median;
  r["shapes"] = shapes;
  write_report(o.out, r);
  return r;
}

json synth_scene(const SynthSceneOptions& o) {
  synthetic::ShapeKind kind{};
  bool found = false;
  for (auto k : synthetic::kAllShapes) {
    if (synthetic::to_string(k) == o.shape) {
      kind = k;
      found = true;
    }
  }
  if (!found) fail(ErrorCode::kInvalidInput, "unknown shape '" + o.shape + "' (sphere|box|capsule-stack)");
  synthetic::CameraParams cam;
  std::tie(cam.width, cam.height) = parse_size(o.size);
  if (o.projection == "far") cam.projection = synthetic::Projection::kFarField;
  else if (o.projection != "near") fail(ErrorCode::kInvalidInput, "--projection must be near or far");
  std::mt19937_64 rng(o.seed);
  const auto scene = synthetic::render(synthetic::random_shape(rng, kind, o.depth_to_height), cam);

  const std::string out = output_path(o.out);
  const std::string mask_out = output_path(o.out_mask.empty() ? sibling(o.out, ".pgm") : o.out_mask);
  const std::string k_out = output_path(o.out_intrinsics.empty() ? sibling(o.out, ".json") : o.out_intrinsics);
  write_scene(out, scene.depth, scene.intrinsics, mask_out, k_out);
  json r = ok("synth scene");
  r["shape"] = o.shape;
  r["depth_to_height"] = scene.shape.depth_to_height;
  r["projection"] = o.projection;
  r["foreground_pixels"] = count_set(scene.depth.mask);
  r["intrinsics"] = io::to_json(scene.intrinsics);
  r["outputs"] = {{"depth", out}, {"mask", mask_out}, {"intrinsics", k_out}};
  return r;
}

}  // namespace lumigeo::cli
