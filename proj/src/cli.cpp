/*
 * Copyright (c) 2026, The lwgnn Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "lwgnn/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "binary_io.hpp"
#include "lwgnn/embedding_store.hpp"
#include "lwgnn/executor.hpp"
#include "lwgnn/generators.hpp"
#include "lwgnn/model.hpp"
#include "lwgnn/random.hpp"
#include "lwgnn/reorder.hpp"
#include "lwgnn/splitter.hpp"
#include "lwgnn/zoo.hpp"

namespace lwgnn {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kCapacity: return kExitConfig;
    case ErrorKind::kFormat:
    case ErrorKind::kShape:
    case ErrorKind::kBounds: return kExitFormat;
    case ErrorKind::kIo: return kExitIo;
    case ErrorKind::kOom: return kExitOom;
    case ErrorKind::kInvariant: return kExitInvariant;
  }
  return kExitInvariant;
}

std::uint64_t parse_byte_size(std::string_view text) {
  static constexpr std::pair<std::string_view, std::uint64_t> kUnits[] = {
      {"GiB", 1ULL << 30}, {"MiB", 1ULL << 20}, {"KiB", 1ULL << 10}, {"B", 1}};
  std::string_view number = text;
  std::uint64_t unit = 1;
  for (const auto& [suffix, scale] : kUnits) {
    if (number.size() > suffix.size() && number.ends_with(suffix)) {
      number.remove_suffix(suffix.size());
      unit = scale;
      break;
    }
  }
  double value = 0;
  const auto [end, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
  if (ec != std::errc() || end != number.data() + number.size() || !(value >= 0) || !std::isfinite(value)) {
    fail(ErrorKind::kConfig, "cannot parse byte size '" + std::string(text) + "'");
  }
  const double bytes = std::floor(value * static_cast<double>(unit));
  if (bytes >= 18446744073709551616.0) fail(ErrorKind::kConfig, "byte size '" + std::string(text) + "' overflows");
  return static_cast<std::uint64_t>(bytes);
}

namespace {

std::vector<NodeId> read_targets(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open targets file " + path.string());
  std::vector<NodeId> ids;
  std::string token;
  while (in >> token) {
    NodeId v = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || end != token.data() + token.size()) {
      fail(ErrorKind::kFormat, path.string() + ": bad node id '" + token + "'");
    }
    ids.push_back(v);
  }
  return ids;
}

void write_text(const fs::path& path, const std::string& text) {
  io::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text(const fs::path& path) {
  const auto bytes = io::read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

struct InferArgs {
  std::string graph, features, model, params;
  std::string mode = "full";
  std::string targets;
  std::size_t fanout = 10;
  std::uint64_t seed = 0;
  std::string executor = "layerwise";
  std::string order = "none";
  std::string device_mem = "1GiB";
  std::uint64_t init_nt = Thresholds{}.max_nodes;
  std::uint64_t init_ni = Thresholds{}.max_edges;
  bool static_thresholds = false;
  std::size_t batch_size = 1024;
  std::string backing = "memory";
  std::string scratch;
  std::string output;
  std::string stats;
  bool timing = false;
};

int cmd_infer(const InferArgs& a, std::ostream& out) {
  InferenceOptions opt;
  opt.mode = parse_infer_mode(a.mode);
  if (opt.mode == InferMode::kPartial && a.targets.empty()) fail(ErrorKind::kConfig, "--mode partial requires --targets");
  if (opt.mode == InferMode::kFull && !a.targets.empty()) fail(ErrorKind::kConfig, "--targets conflicts with --mode full");
  if (opt.mode == InferMode::kSampling && a.fanout == 0) fail(ErrorKind::kConfig, "--fanout must be at least 1");
  if (a.init_nt == 0) fail(ErrorKind::kConfig, "--init-nt must be at least 1");
  if (a.batch_size == 0) fail(ErrorKind::kConfig, "--batch-size must be at least 1");
  if (a.backing != "memory" && a.backing != "file") fail(ErrorKind::kConfig, "--backing must be memory or file");
  opt.executor = parse_executor_kind(a.executor);
  opt.order = parse_order_kind(a.order);
  opt.device_capacity = parse_byte_size(a.device_mem);
  DeviceBudget::with_capacity(opt.device_capacity);
  opt.fanout = a.fanout;
  opt.seed = a.seed;
  opt.thresholds = {a.init_nt, a.init_ni};
  opt.adaptive = !a.static_thresholds;
  opt.batch_size = a.batch_size;
  if (!a.scratch.empty()) opt.scratch_dir = fs::path(a.scratch);
  if (!a.targets.empty()) opt.targets = read_targets(a.targets);

  const CscGraph g = load_graph(a.graph);
  const EmbeddingStore x = EmbeddingStore::open(a.features, a.backing == "file" ? Backing::kFile : Backing::kMemory);
  const ModelGraph m = parse_model(a.model, a.params);

  const Inference result = run_inference(m, g, x, opt);
  if (!a.output.empty()) io::write_file(a.output, encode_features(result.output));
  const std::string stats = stats_json(result.stats, a.timing);
  if (!a.stats.empty()) write_text(a.stats, stats);
  out << "rows=" << result.output.rows() << " dim=" << result.output.cols() << " batches=" << result.stats.batches
      << " transfer_bytes=" << result.stats.transfer_bytes << " aggregations=" << result.stats.aggregations
      << " max_footprint=" << result.stats.max_footprint << "\n";
  return kExitOk;
}

struct GenArgs {
  std::string kind = "regular";
  std::uint64_t nodes = 1000;
  std::uint64_t degree = 4;
  std::uint64_t m = 4;
  std::uint64_t blocks = 20;
  std::uint64_t block_size = 50;
  double p_in = 0.1;
  double p_out = 0.002;
  std::uint64_t seed = 0;
  std::size_t feature_dim = 16;
  std::string model = "gcn";
  int layers = 2;
  std::size_t hidden = 16;
  std::size_t out_dim = 8;
  std::size_t heads = 2;
  std::string out_dir = ".";
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  CscGraph g;
  if (a.kind == "regular") {
    g = gen::regular(a.nodes, a.degree, a.seed);
  } else if (a.kind == "powerlaw") {
    g = gen::powerlaw(a.nodes, a.m, a.seed);
  } else if (a.kind == "sbm") {
    g = gen::sbm(a.blocks, a.block_size, a.p_in, a.p_out, a.seed);
  } else if (a.kind == "path") {
    g = gen::path(a.nodes);
  } else if (a.kind == "toy") {
    g = gen::toy();
  } else {
    fail(ErrorKind::kConfig, "unknown graph kind '" + a.kind + "' (expected regular|powerlaw|sbm|path|toy)");
  }
  ZooOptions zo;
  zo.layers = a.layers;
  zo.input_dim = a.feature_dim;
  zo.hidden = a.hidden;
  zo.out_dim = a.out_dim;
  zo.heads = a.heads;
  zo.seed = mix_seed(a.seed, 1);
  const ModelGraph model = make_model(a.model, zo);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  write_graph(g, dir / "graph.dgig");
  io::write_file(dir / "features.dgif", encode_features(gen::features(g.num_nodes(), a.feature_dim, mix_seed(a.seed, 2))));
  write_text(dir / "model.json", serialize_model(model));
  write_params(model.params(), dir / "params.dgiw");
  out << "nodes=" << g.num_nodes() << " edges=" << g.num_edges() << " depth=" << model.depth() << " -> " << dir.string()
      << "\n";
  return kExitOk;
}

int cmd_reorder(const std::string& graph, const std::string& features, const std::string& order_name, std::uint64_t seed,
                const std::string& out_dir, std::ostream& out) {
  const CscGraph g = load_graph(graph);
  const EmbeddingStore x = EmbeddingStore::open(features, Backing::kMemory);
  const NodeOrder order = make_order(g, parse_order_kind(order_name), seed);
  auto [rg, rx] = apply_order(g, x, order);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_graph(rg, dir / "graph.dgig");
  rx.save(dir / "features.dgif");
  write_permutation(order, dir / "perm.dgip");
  out << "order=" << order_name << " bandwidth_before=" << bandwidth(g) << " bandwidth_after=" << bandwidth(rg) << "\n";
  return kExitOk;
}

int cmd_split(const std::string& model, const std::string& params, std::ostream& out) {
  const ModelGraph m = parse_model(model, params);
  const BlockSchedule s = split(m);
  out << format_schedule(m, s);
  for (const auto& w : s.warnings) out << "warning: " << w << "\n";
  return kExitOk;
}

struct ValidateArgs {
  std::string graph, features, model, params, perm;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  bool ok = true;
  const auto check = [&](const std::string& name, const std::function<std::string()>& body) {
    try {
      const std::string detail = body();
      out << "PASS " << name << (detail.empty() ? "" : ": " + detail) << "\n";
      return true;
    } catch (const std::exception& e) {
      out << "FAIL " << name << ": " << e.what() << "\n";
      ok = false;
      return false;
    }
  };
  std::optional<CscGraph> g;
  std::optional<ParamSet> params;
  if (!a.graph.empty()) {
    check("graph", [&] {
      g = load_graph(a.graph);
      return std::to_string(g->num_nodes()) + " nodes, " + std::to_string(g->num_edges()) + " edges";
    });
  }
  std::optional<DenseMat> x;
  if (!a.features.empty()) {
    check("features", [&] {
      x = decode_features(io::read_file(a.features), a.features);
      return std::to_string(x->rows()) + "x" + std::to_string(x->cols());
    });
    if (g && x) {
      check("features.rows", [&] {
        if (x->rows() != g->num_nodes()) {
          fail(ErrorKind::kShape, std::to_string(x->rows()) + " rows for " + std::to_string(g->num_nodes()) + " nodes");
        }
        return std::string();
      });
    }
  }
  if (!a.params.empty()) {
    check("params", [&] {
      params = load_params(a.params);
      return std::to_string(params->size()) + " tensors";
    });
  }
  if (!a.model.empty()) {
    std::optional<ModelGraph> m;
    check("model", [&] {
      m = parse_model_document(read_text(a.model), params.value_or(ParamSet{}), a.model);
      return "depth " + std::to_string(m->depth());
    });
    if (m) {
      check("schedule", [&] {
        const auto s = split(*m);
        return std::to_string(s.blocks.size()) + " blocks";
      });
      if (x) {
        check("model.input_dim", [&] {
          if (x->cols() != m->input_dim()) {
            fail(ErrorKind::kShape, "features have dim " + std::to_string(x->cols()) + ", model expects " +
                                        std::to_string(m->input_dim()));
          }
          return std::string();
        });
      }
    }
  }
  if (!a.perm.empty()) {
    check("perm", [&] {
      const NodeOrder o = load_permutation(a.perm);
      if (g && o.size() != g->num_nodes()) {
        fail(ErrorKind::kShape, "permutation over " + std::to_string(o.size()) + " nodes for a graph of " +
                                    std::to_string(g->num_nodes()));
      }
      return std::to_string(o.size()) + " entries";
    });
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Layer-wise GNN inference engine"};
  app.require_subcommand(1);

  InferArgs infer;
  auto* ic = app.add_subcommand("infer", "Run inference and write output embeddings");
  ic->add_option("--graph", infer.graph, "Graph file (DGIG)")->required();
  ic->add_option("--features", infer.features, "Feature file (DGIF)")->required();
  ic->add_option("--model", infer.model, "Model document (JSON)")->required();
  ic->add_option("--params", infer.params, "Parameter file (DGIW)")->required();
  ic->add_option("--mode", infer.mode, "full|partial|sampling")->capture_default_str();
  ic->add_option("--targets", infer.targets, "Whitespace-separated target node ids (partial, sampling)");
  ic->add_option("--fanout", infer.fanout, "Sampled in-neighbors per node")->capture_default_str();
  ic->add_option("--seed", infer.seed, "Seed for sampling and random ordering")->capture_default_str();
  ic->add_option("--executor", infer.executor, "layerwise|nodewise")->capture_default_str();
  ic->add_option("--order", infer.order, "rcmk|degree|random|none")->capture_default_str();
  ic->add_option("--device-mem", infer.device_mem, "Device capacity: bytes or with KiB/MiB/GiB")->capture_default_str();
  ic->add_option("--init-nt", infer.init_nt, "Initial node-count threshold")->capture_default_str();
  ic->add_option("--init-ni", infer.init_ni, "Initial edge-count threshold")->capture_default_str();
  ic->add_flag("--static-thresholds", infer.static_thresholds, "Keep thresholds fixed between batches");
  ic->add_option("--batch-size", infer.batch_size, "Targets per batch for the node-wise executor")->capture_default_str();
  ic->add_option("--backing", infer.backing, "Feature store backing: memory|file")->capture_default_str();
  ic->add_option("--scratch", infer.scratch, "Directory for file-backed intermediate stores");
  ic->add_option("--output", infer.output, "Output embedding file (DGIF)");
  ic->add_option("--stats", infer.stats, "Stats document (JSON)");
  ic->add_flag("--timing", infer.timing, "Include wall time in the stats document");

  GenArgs gen_args;
  auto* gc = app.add_subcommand("gen", "Generate a synthetic graph, features, model and parameters");
  gc->add_option("--kind", gen_args.kind, "regular|powerlaw|sbm|path|toy")->capture_default_str();
  gc->add_option("--nodes", gen_args.nodes, "Node count (regular, powerlaw, path)")->capture_default_str();
  gc->add_option("--degree", gen_args.degree, "In-degree (regular)")->capture_default_str();
  gc->add_option("--m", gen_args.m, "In-edges per new node (powerlaw)")->capture_default_str();
  gc->add_option("--blocks", gen_args.blocks, "Block count (sbm)")->capture_default_str();
  gc->add_option("--block-size", gen_args.block_size, "Nodes per block (sbm)")->capture_default_str();
  gc->add_option("--p-in", gen_args.p_in, "Intra-block edge probability (sbm)")->capture_default_str();
  gc->add_option("--p-out", gen_args.p_out, "Inter-block edge probability (sbm)")->capture_default_str();
  gc->add_option("--seed", gen_args.seed, "Seed")->capture_default_str();
  gc->add_option("--feature-dim", gen_args.feature_dim, "Feature width")->capture_default_str();
  gc->add_option("--model", gen_args.model, "gcn|gat|jknet|residual|linear|diamond|branch|chain")->capture_default_str();
  gc->add_option("--layers", gen_args.layers, "Conv layers (gcn, gat, jknet)")->capture_default_str();
  gc->add_option("--hidden", gen_args.hidden, "Hidden width")->capture_default_str();
  gc->add_option("--out-dim", gen_args.out_dim, "Output width")->capture_default_str();
  gc->add_option("--heads", gen_args.heads, "Attention heads (gat)")->capture_default_str();
  gc->add_option("--out-dir", gen_args.out_dir, "Destination directory")->capture_default_str();

  std::string r_graph, r_features, r_order = "rcmk", r_out = ".";
  std::uint64_t r_seed = 0;
  auto* rc = app.add_subcommand("reorder", "Renumber nodes and write the permuted graph, features and permutation");
  rc->add_option("--graph", r_graph, "Graph file (DGIG)")->required();
  rc->add_option("--features", r_features, "Feature file (DGIF)")->required();
  rc->add_option("--order", r_order, "rcmk|degree|random|none")->capture_default_str();
  rc->add_option("--seed", r_seed, "Seed for the random order")->capture_default_str();
  rc->add_option("--out-dir", r_out, "Destination directory")->capture_default_str();

  std::string s_model, s_params;
  auto* sc = app.add_subcommand("split", "Print the ConvBlock schedule of a model");
  sc->add_option("--model", s_model, "Model document (JSON)")->required();
  sc->add_option("--params", s_params, "Parameter file (DGIW)")->required();

  ValidateArgs v;
  auto* vc = app.add_subcommand("validate", "Check file formats and model invariants");
  vc->add_option("--graph", v.graph, "Graph file (DGIG)");
  vc->add_option("--features", v.features, "Feature file (DGIF)");
  vc->add_option("--model", v.model, "Model document (JSON)");
  vc->add_option("--params", v.params, "Parameter file (DGIW)");
  vc->add_option("--perm", v.perm, "Permutation file (DGIP)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*ic) return cmd_infer(infer, out);
    if (*gc) return cmd_gen(gen_args, out);
    if (*rc) return cmd_reorder(r_graph, r_features, r_order, r_seed, r_out, out);
    if (*sc) return cmd_split(s_model, s_params, out);
    if (*vc) return cmd_validate(v, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error [internal]: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitConfig;
}

}  // namespace lwgnn
