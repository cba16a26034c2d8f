#include "cli.hpp"

#include <functional>
#include <iostream>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "lumigeo/error.hpp"
#include "lumigeo/io.hpp"

namespace lumigeo::cli {
namespace {

constexpr int kManifestSchemaVersion = 1;

json error_line(const std::string& code, const std::string& message) {
  return {{"status", "error"}, {"code", code}, {"message", message}};
}

int exit_code_for(ErrorCode code) { return code == ErrorCode::kIo ? kExitIo : kExitValidation; }

json run_manifest(const std::string& path, int& worst);

}  // namespace

Outcome run(const std::vector<std::string>& args) {
  CLI::App app{"lumigeo: iNOD geometry codec, illumination conditioning, latent assembly and evaluation"};
  app.name("lumigeo");
  app.require_subcommand(1);

  std::vector<std::pair<CLI::App*, std::function<json()>>> leaves;
  auto leaf = [&](CLI::App* parent, const char* name, const char* help, std::function<json()> fn) {
    CLI::App* sub = parent->add_subcommand(name, help);
    leaves.emplace_back(sub, std::move(fn));
    return sub;
  };

  // inod
  auto* inod = app.add_subcommand("inod", "isotropic normalized orthographic depth");
  inod->require_subcommand(1);
  InodEncodeOptions ie;
  auto* s = leaf(inod, "encode", "depth map + intrinsics -> iNOD map", [&] { return inod_encode(ie); });
  s->add_option("--depth", ie.depth, "depth PFM")->required();
  s->add_option("--mask", ie.mask, "foreground PGM (default: finite positive depth)");
  s->add_option("--intrinsics", ie.intrinsics, "intrinsics JSON {fx, fy, cx, cy}")->required();
  s->add_option("--out", ie.out, "iNOD PFM")->required();
  s->add_option("--out-mask", ie.out_mask, "mask PGM (default <out>.mask.pgm)");
  s->add_option("--meta", ie.meta, "metadata JSON (default <out>.json)");
  s->add_option("--dilate", ie.dilate, "dilation radius in pixels");

  InodDecodeOptions id;
  s = leaf(inod, "decode", "iNOD map -> point cloud, no intrinsics", [&] { return inod_decode(id); });
  s->add_option("--map", id.map, "iNOD PFM")->required();
  s->add_option("--mask", id.mask, "original foreground PGM")->required();
  s->add_option("--meta", id.meta, "metadata JSON written by encode");
  s->add_option("--out", id.out, "PLY output")->required();
  s->add_flag("--metric", id.metric, "undo the normalization using the stored record");

  InodDilateOptions idl;
  s = leaf(inod, "dilate", "grow the foreground with nearest values", [&] { return inod_dilate(idl); });
  s->add_option("--map", idl.map, "iNOD PFM")->required();
  s->add_option("--mask", idl.mask, "foreground PGM")->required();
  s->add_option("--meta", idl.meta, "metadata JSON");
  s->add_option("--radius", idl.radius, "Chebyshev radius in pixels");
  s->add_option("--out", idl.out, "dilated iNOD PFM")->required();
  s->add_option("--out-dilated", idl.out_dilated, "added-pixel PGM (default <out>.dilated.pgm)");

  InodRoundtripOptions ir;
  s = leaf(inod, "roundtrip", "encode then orthographic decode; report the error", [&] { return inod_roundtrip(ir); });
  s->add_option("--depth", ir.depth, "depth PFM")->required();
  s->add_option("--mask", ir.mask, "foreground PGM");
  s->add_option("--intrinsics", ir.intrinsics, "intrinsics JSON")->required();
  s->add_option("--out", ir.out, "report JSON");

  // envmap
  auto* env = app.add_subcommand("envmap", "equirectangular illumination");
  env->require_subcommand(1);
  EnvDecomposeOptions ed;
  s = leaf(env, "decompose", "HDR -> ldr, log and dir maps", [&] { return envmap_decompose(ed); });
  s->add_option("--hdr", ed.hdr, "HDR or PFM input")->required();
  s->add_option("--out-dir", ed.out_dir, "output directory")->required();

  EnvRotateOptions er;
  s = leaf(env, "rotate", "yaw rotation", [&] { return envmap_rotate(er); });
  s->add_option("--hdr", er.hdr, "HDR or PFM input")->required();
  s->add_option("--yaw", er.yaw, "radians")->required();
  s->add_option("--out", er.out, "HDR or PFM output")->required();

  EnvScaleOptions es;
  s = leaf(env, "scale", "intensity scaling", [&] { return envmap_scale(es); });
  s->add_option("--hdr", es.hdr, "HDR or PFM input")->required();
  s->add_option("--factor", es.factor, "non-negative factor")->required();
  s->add_option("--out", es.out, "HDR or PFM output")->required();

  EnvFromLedsOptions el;
  s = leaf(env, "from-leds", "splat an LED array into a latlong map", [&] { return envmap_from_leds(el); });
  s->add_option("--leds", el.leds, "LED JSON list")->required();
  s->add_option("--size", el.size, "WxH with W = 2H");
  s->add_option("--splat-radius", el.splat_radius, "pixels");
  s->add_option("--out", el.out, "HDR or PFM output")->required();

  // assemble
  AssembleOptions as;
  s = leaf(&app, "assemble", "build the 5 x H x W x 84 modality stack", [&] { return assemble(as); });
  s->add_option("--latents", as.latents, "one [5,H,W,16] GRLT or five [H,W,16] files, comma separated")->required();
  s->add_option("--global", as.global, "global image latent GRLT");
  s->add_option("--illum", as.illumination, "illumination latent: one 48-channel or three 16-channel GRLT");
  s->add_option("--mode", as.mode, "training mode row");
  s->add_option("--dataset", as.dataset, "Synth|Dome|ITW (checked against the mode)");
  s->add_option("--clear", as.clear, "clear modalities, e.g. a,n,g,s (overrides --mode)");
  s->add_option("--table", as.table, "modality type table JSON");
  s->add_option("--out", as.out, "stack GRLT")->required();

  // sample
  SampleOptions sa;
  s = leaf(&app, "sample", "first-order EDM sampling with a mock denoiser", [&] { return sample(sa); });
  s->add_option("--latents", sa.latents, "clean latents for clear modalities");
  s->add_option("--latent-size", sa.latent_size, "WxH when no latents are given");
  s->add_option("--global", sa.global, "global image latent GRLT");
  s->add_option("--illum", sa.illumination, "illumination latent GRLT(s)");
  s->add_option("--mode", sa.mode, "training mode row");
  s->add_option("--dataset", sa.dataset, "Synth|Dome|ITW");
  s->add_option("--clear", sa.clear, "clear modalities (overrides --mode)");
  s->add_option("--table", sa.table, "modality type table JSON");
  s->add_option("--schedule", sa.schedule, "JSON array of noise levels ending in 0");
  s->add_option("--steps", sa.steps, "Karras schedule steps");
  s->add_option("--sigma-min", sa.sigma_min);
  s->add_option("--sigma-max", sa.sigma_max);
  s->add_option("--rho", sa.rho);
  s->add_option("--seed", sa.seed, "noise seed");
  s->add_option("--denoiser", sa.denoiser, "identity|shrink");
  s->add_option("--out", sa.out, "[5,H,W,16] GRLT")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "metrics");
  ev->require_subcommand(1);
  EvalGeometryOptions eg;
  s = leaf(ev, "geometry", "shared cube + ICP + Chamfer / F-score", [&] { return eval_geometry(eg); });
  s->add_option("--pred", eg.pred, "predicted PLY")->required();
  s->add_option("--gt", eg.gt, "ground-truth PLY")->required();
  s->add_option("--threshold", eg.threshold, "F-score threshold in cube units");
  s->add_option("--icp-iters", eg.icp_iters);
  s->add_option("--icp-tol", eg.icp_tol);
  s->add_option("--out", eg.out, "report JSON");

  EvalRelightOptions el2;
  s = leaf(ev, "relight", "chromatic alignment + PSNR / SSIM / RMSE", [&] { return eval_relight(el2); });
  s->add_option("--pred", el2.pred, "prediction PFM or HDR")->required();
  s->add_option("--gt", el2.gt, "ground truth PFM or HDR")->required();
  s->add_option("--mask", el2.mask, "foreground PGM (default: everything)");
  s->add_flag("--no-align", el2.no_align, "skip chromatic alignment");
  s->add_option("--out", el2.out, "report JSON");

  EvalNormalOptions en;
  s = leaf(ev, "normal", "angular error and RMSE of normal maps", [&] { return eval_normal(en); });
  s->add_option("--pred", en.pred, "3-channel PFM")->required();
  s->add_option("--gt", en.gt, "3-channel PFM")->required();
  s->add_option("--mask", en.mask, "foreground PGM (default: everything)");
  s->add_flag("--unit-encoded", en.unit_encoded, "maps store (n + 1) / 2");
  s->add_option("--out", en.out, "report JSON");

  // bench
  auto* bench = app.add_subcommand("bench", "experiments");
  bench->require_subcommand(1);
  BenchDilationOptions bd;
  s = leaf(bench, "dilation", "boundary error with and without dilation", [&] { return bench_dilation(bd); });
  s->add_option("--corpus", bd.corpus, "directory of NAME.pfm + NAME.json (+ NAME.pgm)");
  s->add_option("--generate", bd.generate, "procedural corpus size");
  s->add_option("--seed", bd.seed, "procedural corpus seed");
  s->add_option("--save-corpus", bd.save_corpus, "write the corpus used");
  s->add_option("--radius", bd.radius, "dilation radius");
  s->add_option("--band", bd.band, "boundary band width");
  s->add_option("--out", bd.out, "report JSON");

  // synth
  auto* synth = app.add_subcommand("synth", "procedural inputs");
  synth->require_subcommand(1);
  SynthSceneOptions ss;
  s = leaf(synth, "scene", "render a depth map of a procedural shape", [&] { return synth_scene(ss); });
  s->add_option("--shape", ss.shape, "sphere|box|capsule-stack");
  s->add_option("--dh", ss.depth_to_height, "depth-to-height ratio");
  s->add_option("--projection", ss.projection, "near|far");
  s->add_option("--size", ss.size, "WxH");
  s->add_option("--seed", ss.seed, "pose seed");
  s->add_option("--out", ss.out, "depth PFM")->required();
  s->add_option("--out-mask", ss.out_mask, "mask PGM (default <out>.pgm)");
  s->add_option("--out-intrinsics", ss.out_intrinsics, "intrinsics JSON (default <out>.json)");

  // manifest
  auto* manifest = app.add_subcommand("manifest", "batch jobs");
  manifest->require_subcommand(1);
  std::string manifest_path;
  int manifest_worst = kExitOk;
  s = leaf(manifest, "run", "run every job of a manifest in order",
           [&] { return run_manifest(manifest_path, manifest_worst); });
  s->add_option("--manifest", manifest_path, "manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    return {kExitOk, nullptr, app.help()};
  } catch (const CLI::CallForAllHelp&) {
    return {kExitOk, nullptr, app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    std::string usage = e.what();
    usage += "\n";
    for (auto* sub = &app; sub;) {
      CLI::App* next = nullptr;
      for (auto* child : sub->get_subcommands()) next = child;
      if (!next) {
        usage += sub->help();
        break;
      }
      sub = next;
    }
    return {kExitValidation, error_line("usage", e.what()), usage};
  }

  for (auto& [sub, fn] : leaves) {
    if (!sub->parsed()) continue;
    try {
      json result = fn();
      return {manifest_worst, std::move(result), {}};
    } catch (const Error& e) {
      return {exit_code_for(e.code()), error_line(to_string(e.code()), e.what()), {}};
    } catch (const std::exception& e) {
      return {kExitValidation, error_line("internal", e.what()), {}};
    }
  }
  return {kExitValidation, error_line("usage", "no command given"), app.help()};
}

namespace {

json run_manifest(const std::string& path, int& worst) {
  const json m = io::read_json(path);
  if (!m.is_object() || !m.contains("jobs") || !m["jobs"].is_array()) {
    fail(ErrorCode::kInvalidInput, "manifest needs a 'jobs' array");
  }
  if (m.value("schema_version", kManifestSchemaVersion) != kManifestSchemaVersion) {
    fail(ErrorCode::kInvalidInput, "unsupported manifest schema_version");
  }
  json results = json::array();
  for (const auto& job : m["jobs"]) {
    if (!job.is_object() || !job.contains("command") || !job["command"].is_string()) {
      fail(ErrorCode::kInvalidInput, "every job needs a 'command' string");
    }
    std::vector<std::string> args;
    std::istringstream words(job["command"].get<std::string>());
    for (std::string w; words >> w;) args.push_back(w);
    if (!args.empty() && args.front() == "manifest") fail(ErrorCode::kInvalidInput, "manifests cannot nest");
    for (const char* section : {"inputs", "outputs", "params"}) {
      if (!job.contains(section)) continue;
      if (!job[section].is_object()) fail(ErrorCode::kInvalidInput, std::string("'") + section + "' must be an object");
      for (const auto& [flag, value] : job[section].items()) {
        if (value.is_boolean()) {
          if (value.get<bool>()) args.push_back("--" + flag);
          continue;
        }
        args.push_back("--" + flag);
        args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
      }
    }
    if (job.contains("seed")) {
      args.push_back("--seed");
      args.push_back(job["seed"].dump());
    }
    Outcome o = run(args);
    worst = std::max(worst, o.exit_code);
    results.push_back({{"command", job["command"]}, {"exit_code", o.exit_code}, {"result", o.result}});
  }
  return {{"command", "manifest run"},
          {"status", worst == kExitOk ? "ok" : "partial"},
          {"schema_version", kManifestSchemaVersion},
          {"jobs", results}};
}

}  // namespace
}  // namespace lumigeo::cli
