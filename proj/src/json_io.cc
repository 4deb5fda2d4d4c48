// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#include "recshard/json_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "recshard/error.h"

namespace recshard {
namespace {

[[noreturn]] void Fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

// Tracks which keys of an object were consumed so leftovers can be reported.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) Fail(path_, "expected an object");
  }

  const Json& Need(const std::string& key) {
    const Json* v = Maybe(key);
    if (!v) Fail(path_, "missing key '" + key + "'");
    return *v;
  }

  // Null counts as absent.
  const Json* Maybe(const std::string& key) {
    used_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  bool Has(const std::string& key) const { return j_.contains(key); }
  std::string Path(const std::string& key) const { return path_ + "." + key; }

  void Done() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) Fail(path_, "unknown key '" + key + "'");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

double AsDouble(const Json& j, const std::string& path) {
  if (!j.is_number()) Fail(path, "expected a number");
  return j.get<double>();
}

int64_t AsInt(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) {
    const uint64_t v = j.get<uint64_t>();
    if (v > static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
      Fail(path, "integer out of range");
    }
    return static_cast<int64_t>(v);
  }
  if (j.is_number_integer()) return j.get<int64_t>();
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (!std::isfinite(d) || d != std::trunc(d) || std::fabs(d) >= 0x1p63) {
      Fail(path, "expected an integer");
    }
    return static_cast<int64_t>(d);
  }
  Fail(path, "expected an integer");
}

uint64_t AsUint(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<uint64_t>();
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (!(d >= 0) || d != std::trunc(d) || d >= 0x1p64) {
      Fail(path, "expected a non-negative integer");
    }
    return static_cast<uint64_t>(d);
  }
  const int64_t v = AsInt(j, path);
  if (v < 0) Fail(path, "expected a non-negative integer");
  return static_cast<uint64_t>(v);
}

int AsInt32(const Json& j, const std::string& path) {
  const int64_t v = AsInt(j, path);
  if (v < std::numeric_limits<int>::min() ||
      v > std::numeric_limits<int>::max()) {
    Fail(path, "integer out of range");
  }
  return static_cast<int>(v);
}

uint32_t AsUint32(const Json& j, const std::string& path) {
  const uint64_t v = AsUint(j, path);
  if (v > std::numeric_limits<uint32_t>::max()) {
    Fail(path, "integer out of range");
  }
  return static_cast<uint32_t>(v);
}

std::string AsString(const Json& j, const std::string& path) {
  if (!j.is_string()) Fail(path, "expected a string");
  return j.get<std::string>();
}

const Json& AsArray(const Json& j, const std::string& path) {
  if (!j.is_array()) Fail(path, "expected an array");
  return j;
}

std::vector<int64_t> IntList(const Json& j, const std::string& path) {
  std::vector<int64_t> out;
  for (size_t i = 0; i < AsArray(j, path).size(); ++i) {
    out.push_back(AsInt(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> DoubleList(const Json& j, const std::string& path) {
  std::vector<double> out;
  for (size_t i = 0; i < AsArray(j, path).size(); ++i) {
    out.push_back(AsDouble(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

template <typename Fn>
auto Rethrow(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

InteractionKind ParseInteractionKind(const Json& j, const std::string& path) {
  const std::string kind = AsString(j, path);
  if (kind == "dot") return InteractionKind::kDotPairwise;
  if (kind == "concat") return InteractionKind::kConcat;
  Fail(path, "interaction kind must be 'dot' or 'concat'");
}

const char* InteractionKindName(InteractionKind kind) {
  return kind == InteractionKind::kDotPairwise ? "dot" : "concat";
}

// ---- model ----

SparseFeatureSpec SparseFromJson(const Json& j, const std::string& path) {
  Reader r(j, path);
  SparseFeatureSpec s;
  s.hash_size = AsUint(r.Need("hash_size"), r.Path("hash_size"));
  s.embedding_dim = AsUint32(r.Need("dim"), r.Path("dim"));
  s.mean_pooling = AsDouble(r.Need("pooling"), r.Path("pooling"));
  s.truncation = AsUint32(r.Need("truncation"), r.Path("truncation"));
  if (const Json* v = r.Maybe("bytes_per_element")) {
    s.bytes_per_element = AsUint32(*v, r.Path("bytes_per_element"));
  }
  r.Done();
  return s;
}

ModelConfig InlineModelFromJson(const Json& j, const std::string& path) {
  Reader r(j, path);
  if (const Json* v = r.Maybe("name")) AsString(*v, r.Path("name"));
  const int64_t dense = AsInt(r.Need("dense_count"), r.Path("dense_count"));
  std::vector<SparseFeatureSpec> sparse;
  const Json& list = AsArray(r.Need("sparse"), r.Path("sparse"));
  for (size_t i = 0; i < list.size(); ++i) {
    sparse.push_back(
        SparseFromJson(list[i], r.Path("sparse") + "[" + std::to_string(i) + "]"));
  }
  const auto bottom = IntList(r.Need("bottom_mlp"), r.Path("bottom_mlp"));
  const auto top = IntList(r.Need("top_mlp"), r.Path("top_mlp"));
  Interaction inter;
  if (const Json* v = r.Maybe("interaction")) {
    Reader ir(*v, r.Path("interaction"));
    inter.kind = ParseInteractionKind(ir.Need("kind"), ir.Path("kind"));
    if (const Json* p = ir.Maybe("projection_dim")) {
      inter.projection_dim = AsUint32(*p, ir.Path("projection_dim"));
    }
    ir.Done();
  }
  const int64_t batch = AsInt(r.Need("batch_size"), r.Path("batch_size"));
  r.Done();
  return Rethrow(path, [&] {
    return MakeModel(dense, std::move(sparse), bottom, top, inter, batch);
  });
}

std::pair<int64_t, int64_t> IntPair(const Json& j, const std::string& path) {
  const auto v = IntList(j, path);
  if (v.size() != 2) Fail(path, "expected [min, max]");
  return {v[0], v[1]};
}

std::pair<double, double> DoublePair(const Json& j, const std::string& path) {
  const auto v = DoubleList(j, path);
  if (v.size() != 2) Fail(path, "expected [min, max]");
  return {v[0], v[1]};
}

// ---- hardware ----

const char* LinkKindName(LinkKind kind) {
  switch (kind) {
    case LinkKind::kGpuP2P:
      return "gpu_p2p";
    case LinkKind::kHostStaging:
      return "host_staging";
    case LinkKind::kNetwork:
      return "network";
  }
  return "network";
}

LinkSpec LinkFromJson(const Json& j, const std::string& path) {
  Reader r(j, path);
  LinkSpec link;
  link.bandwidth = AsDouble(r.Need("bandwidth"), r.Path("bandwidth"));
  link.latency = AsDouble(r.Need("latency"), r.Path("latency"));
  const std::string kind = AsString(r.Need("kind"), r.Path("kind"));
  if (kind == "gpu_p2p") {
    link.kind = LinkKind::kGpuP2P;
  } else if (kind == "host_staging") {
    link.kind = LinkKind::kHostStaging;
  } else if (kind == "network") {
    link.kind = LinkKind::kNetwork;
  } else {
    Fail(r.Path("kind"), "expected gpu_p2p, host_staging or network");
  }
  r.Done();
  return link;
}

Json LinkToJson(const LinkSpec& link) {
  return {{"bandwidth", link.bandwidth},
          {"latency", link.latency},
          {"kind", LinkKindName(link.kind)}};
}

DeviceSpec DeviceFromJson(const Json& j, const std::string& path,
                          DeviceKind expected) {
  Reader r(j, path);
  DeviceSpec d;
  d.kind = expected;
  if (const Json* v = r.Maybe("kind")) {
    const std::string kind = AsString(*v, r.Path("kind"));
    const char* want = expected == DeviceKind::kGpu ? "gpu" : "cpu_socket";
    if (kind != want) Fail(r.Path("kind"), std::string("expected ") + want);
  }
  d.mem_capacity = AsUint(r.Need("mem_capacity"), r.Path("mem_capacity"));
  d.mem_bandwidth = AsDouble(r.Need("mem_bandwidth"), r.Path("mem_bandwidth"));
  d.compute = AsDouble(r.Need("compute"), r.Path("compute"));
  d.per_op_overhead =
      AsDouble(r.Need("per_op_overhead"), r.Path("per_op_overhead"));
  d.per_lookup_overhead =
      AsDouble(r.Need("per_lookup_overhead"), r.Path("per_lookup_overhead"));
  if (const Json* v = r.Maybe("cores")) d.cores = AsInt32(*v, r.Path("cores"));
  r.Done();
  return d;
}

Json DeviceToJson(const DeviceSpec& d) {
  return {{"kind", d.kind == DeviceKind::kGpu ? "gpu" : "cpu_socket"},
          {"mem_capacity", d.mem_capacity},
          {"mem_bandwidth", d.mem_bandwidth},
          {"compute", d.compute},
          {"per_op_overhead", d.per_op_overhead},
          {"per_lookup_overhead", d.per_lookup_overhead},
          {"cores", d.cores}};
}

std::vector<DeviceSpec> DeviceListFromJson(const Json& j,
                                           const std::string& path,
                                           DeviceKind kind) {
  std::vector<DeviceSpec> out;
  for (size_t i = 0; i < AsArray(j, path).size(); ++i) {
    out.push_back(
        DeviceFromJson(j[i], path + "[" + std::to_string(i) + "]", kind));
  }
  return out;
}

// ---- placement ----

PlacementStrategy StrategyFromLabel(const std::string& label,
                                    const std::string& path) {
  if (label == "gpu_memory" || label == "gpu_memory/table_wise") {
    return GpuMemoryPlacement{Partition::kTableWise};
  }
  if (label == "gpu_memory/row_wise") {
    return GpuMemoryPlacement{Partition::kRowWise};
  }
  if (label == "host_memory") return HostMemoryPlacement{};
  const size_t slash = label.find('/');
  const std::string head = label.substr(0, slash);
  const std::string tail =
      slash == std::string::npos ? "" : label.substr(slash + 1);
  const char* first = tail.data();
  const char* last = tail.data() + tail.size();
  if (head == "remote_ps" && !tail.empty()) {
    int n = 0;
    const auto res = std::from_chars(first, last, n);
    if (res.ec == std::errc() && res.ptr == last) return RemotePsPlacement{n};
  }
  if (head == "hybrid" && !tail.empty()) {
    double f = 0;
    const auto res = std::from_chars(first, last, f);
    if (res.ec == std::errc() && res.ptr == last) return HybridPlacement{f};
  }
  Fail(path, "unknown strategy '" + label + "'");
}

}  // namespace

Json ParseJson(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string(source) + ": invalid JSON: " + e.what());
  }
}

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseJson(buf.str(), path.string());
}

std::string DumpJson(const Json& j) { return j.dump(2) + "\n"; }

ModelConfig ModelFromJson(const Json& j, uint64_t seed) {
  const std::string path = "model";
  if (j.is_object() && j.contains("preset")) {
    Reader r(j, path);
    const std::string name = AsString(r.Need("preset"), r.Path("preset"));
    ModelConfig m = Rethrow(path, [&] { return ProductionPreset(name); });
    if (const Json* v = r.Maybe("batch_size")) {
      m.batch_size = AsInt(*v, r.Path("batch_size"));
    }
    r.Done();
    Rethrow(path, [&] { ValidateModel(m); });
    return m;
  }
  if (j.is_object() && j.contains("synthetic")) {
    Reader r(j, path);
    const SynthPopulationParams p =
        PopulationFromJson(r.Need("synthetic"), seed);
    r.Done();
    return Rethrow(path, [&] { return GenerateSyntheticModel(p); });
  }
  return InlineModelFromJson(j, path);
}

Json ModelToJson(const ModelConfig& m) {
  Json sparse = Json::array();
  for (const auto& s : m.sparse) {
    sparse.push_back({{"hash_size", s.hash_size},
                      {"dim", s.embedding_dim},
                      {"pooling", s.mean_pooling},
                      {"truncation", s.truncation},
                      {"bytes_per_element", s.bytes_per_element}});
  }
  return {{"dense_count", m.dense_count},
          {"sparse", sparse},
          {"bottom_mlp", m.bottom_mlp.layer_widths},
          {"top_mlp", m.top_mlp.layer_widths},
          {"interaction",
           {{"kind", InteractionKindName(m.interaction.kind)},
            {"projection_dim", m.interaction.projection_dim}}},
          {"batch_size", m.batch_size}};
}

SynthPopulationParams PopulationFromJson(const Json& j, uint64_t seed) {
  Reader r(j, "synthetic");
  SynthPopulationParams p;
  p.seed = seed;
  if (const Json* v = r.Maybe("num_sparse")) {
    std::tie(p.num_sparse.min, p.num_sparse.max) =
        IntPair(*v, r.Path("num_sparse"));
  }
  if (const Json* v = r.Maybe("num_dense")) {
    std::tie(p.num_dense.min, p.num_dense.max) =
        IntPair(*v, r.Path("num_dense"));
  }
  if (const Json* v = r.Maybe("pooling_exponent")) {
    p.pooling_exponent = AsDouble(*v, r.Path("pooling_exponent"));
  }
  if (const Json* v = r.Maybe("pooling")) {
    std::tie(p.pooling.min, p.pooling.max) = DoublePair(*v, r.Path("pooling"));
  }
  if (const Json* v = r.Maybe("hash_size")) {
    std::tie(p.hash_size.min, p.hash_size.max) =
        DoublePair(*v, r.Path("hash_size"));
  }
  if (const Json* v = r.Maybe("embedding_dim")) {
    p.embedding_dim = AsUint32(*v, r.Path("embedding_dim"));
  }
  if (const Json* v = r.Maybe("seed")) p.seed = AsUint(*v, r.Path("seed"));
  if (const Json* v = r.Maybe("truncation")) {
    p.truncation = AsUint32(*v, r.Path("truncation"));
  }
  if (const Json* v = r.Maybe("bottom_mlp")) {
    p.bottom_widths = IntList(*v, r.Path("bottom_mlp"));
  }
  if (const Json* v = r.Maybe("top_mlp")) {
    p.top_widths = IntList(*v, r.Path("top_mlp"));
  }
  if (const Json* v = r.Maybe("interaction")) {
    p.interaction = ParseInteractionKind(*v, r.Path("interaction"));
  }
  if (const Json* v = r.Maybe("batch_size")) {
    p.batch_size = AsInt(*v, r.Path("batch_size"));
  }
  r.Done();
  Rethrow("synthetic", [&] { p.Validate(); });
  return p;
}

PlatformSpec PlatformFromJson(const Json& j) {
  const std::string path = "platform";
  if (j.is_string()) {
    return Rethrow(path, [&] { return PlatformPreset(j.get<std::string>()); });
  }
  Reader r(j, path);
  PlatformSpec p;
  const bool from_preset = r.Has("preset");
  if (from_preset) {
    const std::string name = AsString(r.Need("preset"), r.Path("preset"));
    p = Rethrow(path, [&] { return PlatformPreset(name); });
  }
  // Every key is an override on a preset and mandatory otherwise (gpus and
  // power_units may always be omitted).
  auto field = [&](const char* key, bool optional) -> const Json* {
    const Json* v = r.Maybe(key);
    if (!v && !from_preset && !optional) {
      Fail(path, std::string("missing key '") + key + "'");
    }
    return v;
  };
  if (const Json* v = field("name", false)) p.name = AsString(*v, r.Path("name"));
  if (const Json* v = field("cpu_sockets", false)) {
    p.cpu_sockets =
        DeviceListFromJson(*v, r.Path("cpu_sockets"), DeviceKind::kCpuSocket);
  }
  if (const Json* v = field("gpus", true)) {
    p.gpus = DeviceListFromJson(*v, r.Path("gpus"), DeviceKind::kGpu);
  }
  if (const Json* v = field("intra_gpu_link", false)) {
    p.intra_gpu_link = LinkFromJson(*v, r.Path("intra_gpu_link"));
  }
  if (const Json* v = field("host_device_link", false)) {
    p.host_device_link = LinkFromJson(*v, r.Path("host_device_link"));
  }
  if (const Json* v = field("nic", false)) p.nic = LinkFromJson(*v, r.Path("nic"));
  if (r.Has("power_units")) {
    const Json* v = r.Maybe("power_units");
    p.power_units = v ? std::optional(AsDouble(*v, r.Path("power_units")))
                      : std::nullopt;
  }
  r.Done();
  Rethrow(path, [&] { p.Validate(); });
  return p;
}

Json PlatformToJson(const PlatformSpec& p) {
  Json sockets = Json::array();
  for (const auto& d : p.cpu_sockets) sockets.push_back(DeviceToJson(d));
  Json gpus = Json::array();
  for (const auto& d : p.gpus) gpus.push_back(DeviceToJson(d));
  return {{"name", p.name},
          {"cpu_sockets", sockets},
          {"gpus", gpus},
          {"intra_gpu_link", LinkToJson(p.intra_gpu_link)},
          {"host_device_link", LinkToJson(p.host_device_link)},
          {"nic", LinkToJson(p.nic)},
          {"power_units", p.power_units ? Json(*p.power_units) : Json()}};
}

PlacementStrategy StrategyFromJson(const Json& j) {
  const std::string path = "strategy";
  PlacementStrategy s;
  if (j.is_string()) {
    s = StrategyFromLabel(j.get<std::string>(), path);
  } else {
    Reader r(j, path);
    const std::string kind = AsString(r.Need("kind"), r.Path("kind"));
    if (kind == "gpu_memory") {
      GpuMemoryPlacement g;
      if (const Json* v = r.Maybe("partition")) {
        const std::string part = AsString(*v, r.Path("partition"));
        if (part == "table_wise") {
          g.partition = Partition::kTableWise;
        } else if (part == "row_wise") {
          g.partition = Partition::kRowWise;
        } else {
          Fail(r.Path("partition"), "expected table_wise or row_wise");
        }
      }
      s = g;
    } else if (kind == "host_memory") {
      s = HostMemoryPlacement{};
    } else if (kind == "remote_ps") {
      s = RemotePsPlacement{
          AsInt32(r.Need("num_servers"), r.Path("num_servers"))};
    } else if (kind == "hybrid") {
      s = HybridPlacement{AsDouble(r.Need("gpu_budget_fraction"),
                                   r.Path("gpu_budget_fraction"))};
    } else {
      Fail(r.Path("kind"), "unknown strategy kind '" + kind + "'");
    }
    r.Done();
  }
  Rethrow(path, [&] { ValidateStrategy(s); });
  return s;
}

Json StrategyToJson(const PlacementStrategy& strategy) {
  if (const auto* g = std::get_if<GpuMemoryPlacement>(&strategy)) {
    return {{"kind", "gpu_memory"},
            {"partition", g->partition == Partition::kTableWise ? "table_wise"
                                                                : "row_wise"}};
  }
  if (std::holds_alternative<HostMemoryPlacement>(strategy)) {
    return {{"kind", "host_memory"}};
  }
  if (const auto* r = std::get_if<RemotePsPlacement>(&strategy)) {
    return {{"kind", "remote_ps"}, {"num_servers", r->num_servers}};
  }
  const auto& h = std::get<HybridPlacement>(strategy);
  return {{"kind", "hybrid"}, {"gpu_budget_fraction", h.gpu_budget_fraction}};
}

ClusterTopology TopologyFromJson(const Json& j) {
  Reader r(j, "topology");
  ClusterTopology t;
  t.num_trainers = AsInt32(r.Need("trainers"), r.Path("trainers"));
  if (const Json* v = r.Maybe("dense_ps")) {
    t.num_dense_ps = AsInt32(*v, r.Path("dense_ps"));
  }
  if (const Json* v = r.Maybe("sparse_ps")) {
    t.num_sparse_ps = AsInt32(*v, r.Path("sparse_ps"));
  }
  if (const Json* v = r.Maybe("readers")) {
    t.num_readers = AsInt32(*v, r.Path("readers"));
  }
  if (const Json* v = r.Maybe("sync")) {
    Reader s(*v, r.Path("sync"));
    if (const Json* m = s.Maybe("method")) {
      const std::string method = AsString(*m, s.Path("method"));
      if (method == "easgd") {
        t.sync.method = SyncMethod::kEasgd;
      } else if (method == "fully_sync") {
        t.sync.method = SyncMethod::kFullySync;
      } else {
        Fail(s.Path("method"), "expected easgd or fully_sync");
      }
    }
    if (const Json* p = s.Maybe("period")) {
      t.sync.period = AsInt32(*p, s.Path("period"));
    }
    if (const Json* h = s.Maybe("hogwild")) {
      t.sync.hogwild_threads = AsInt32(*h, s.Path("hogwild"));
    }
    if (const Json* g = s.Maybe("sigma")) {
      t.sync.scaling_penalty = AsDouble(*g, s.Path("sigma"));
    }
    s.Done();
  }
  r.Done();
  return t;
}

Json TopologyToJson(const ClusterTopology& t) {
  return {{"trainers", t.num_trainers},
          {"dense_ps", t.num_dense_ps},
          {"sparse_ps", t.num_sparse_ps},
          {"readers", t.num_readers},
          {"sync",
           {{"method", t.sync.method == SyncMethod::kEasgd ? "easgd"
                                                           : "fully_sync"},
            {"period", t.sync.period},
            {"hogwild", t.sync.hogwild_threads},
            {"sigma", t.sync.scaling_penalty}}}};
}

CalibrationCoefficients CoefficientsFromJson(
    const Json& j, const CalibrationCoefficients& base) {
  Reader r(j, "coefficients");
  CalibrationCoefficients c = base;
  const std::pair<const char*, double*> fields[] = {
      {"compute_efficiency", &c.compute_efficiency},
      {"overlap", &c.overlap},
      {"backward_ratio_dense", &c.backward_ratio_dense},
      {"backward_ratio_emb", &c.backward_ratio_emb},
      {"host_processing_cost", &c.host_processing_cost},
      {"per_op_overhead_scale", &c.per_op_overhead_scale},
  };
  for (const auto& [key, dst] : fields) {
    if (const Json* v = r.Maybe(key)) *dst = AsDouble(*v, r.Path(key));
  }
  r.Done();
  Rethrow("coefficients", [&] { c.Validate(); });
  return c;
}

Json CoefficientsToJson(const CalibrationCoefficients& c) {
  return {{"compute_efficiency", c.compute_efficiency},
          {"overlap", c.overlap},
          {"backward_ratio_dense", c.backward_ratio_dense},
          {"backward_ratio_emb", c.backward_ratio_emb},
          {"host_processing_cost", c.host_processing_cost},
          {"per_op_overhead_scale", c.per_op_overhead_scale}};
}

TrainerEnvironment EnvironmentFromJson(const Json& j) {
  Reader r(j, "environment");
  TrainerEnvironment env;
  if (const Json* v = r.Maybe("reader_bandwidth")) {
    env.reader_bandwidth = AsDouble(*v, r.Path("reader_bandwidth"));
  }
  if (const Json* v = r.Maybe("ps_platform")) {
    env.ps_platform = PlatformFromJson(*v);
  }
  if (const Json* v = r.Maybe("hogwild_threads")) {
    env.hogwild_threads = AsInt32(*v, r.Path("hogwild_threads"));
  }
  if (const Json* v = r.Maybe("sync_period")) {
    env.sync_period = AsDouble(*v, r.Path("sync_period"));
  }
  r.Done();
  Rethrow("environment", [&] { env.Validate(); });
  return env;
}

Scenario ScenarioFromJson(const Json& j, uint64_t seed) {
  Reader r(j, "scenario");
  if (const Json* v = r.Maybe("seed")) seed = AsUint(*v, r.Path("seed"));
  Scenario s;
  s.id = "scenario";
  if (const Json* v = r.Maybe("id")) s.id = AsString(*v, r.Path("id"));
  s.model = ModelFromJson(r.Need("model"), seed);
  s.platform = PlatformFromJson(r.Need("platform"));
  s.strategy = StrategyFromJson(r.Need("strategy"));
  if (const Json* v = r.Maybe("topology")) s.topology = TopologyFromJson(*v);
  if (const Json* v = r.Maybe("environment")) s.env = EnvironmentFromJson(*v);
  if (const Json* v = r.Maybe("coefficients")) {
    s.coeffs = CoefficientsFromJson(*v);
  }
  r.Done();
  return s;
}

SweepSpec SweepSpecFromJson(const Json& j) {
  Reader r(j, "sweep");
  SweepSpec spec;
  if (const Json* v = r.Maybe("seed")) spec.seed = AsUint(*v, r.Path("seed"));
  if (const Json* v = r.Maybe("output")) AsString(*v, r.Path("output"));
  spec.base = ScenarioFromJson(r.Need("base"), spec.seed);
  const Json& axes = AsArray(r.Need("axes"), r.Path("axes"));
  for (size_t i = 0; i < axes.size(); ++i) {
    Reader ar(axes[i], r.Path("axes") + "[" + std::to_string(i) + "]");
    SweepAxis axis;
    axis.param = Rethrow(ar.Path("param"), [&] {
      return ParseSweepParam(AsString(ar.Need("param"), ar.Path("param")));
    });
    const Json& values = AsArray(ar.Need("values"), ar.Path("values"));
    for (size_t k = 0; k < values.size(); ++k) {
      const std::string vp = ar.Path("values") + "[" + std::to_string(k) + "]";
      switch (axis.param) {
        case SweepParam::kMlp:
          axis.values.emplace_back(Rethrow(
              vp, [&] { return ParseMlpShape(AsString(values[k], vp)); }));
          break;
        case SweepParam::kStrategy:
          axis.values.emplace_back(
              Rethrow(vp, [&] { return StrategyFromJson(values[k]); }));
          break;
        case SweepParam::kPlatform:
          axis.values.emplace_back(
              Rethrow(vp, [&] { return PlatformFromJson(values[k]); }));
          break;
        default:
          axis.values.emplace_back(AsInt(values[k], vp));
      }
    }
    ar.Done();
    spec.axes.push_back(std::move(axis));
  }
  r.Done();
  Rethrow("sweep", [&] { spec.Validate(); });
  return spec;
}

std::vector<CalibrationReference> ReferencesFromJson(const Json& j) {
  Reader r(j, "refs");
  const Json& list = AsArray(r.Need("references"), r.Path("references"));
  std::vector<CalibrationReference> refs;
  for (size_t i = 0; i < list.size(); ++i) {
    const std::string path =
        r.Path("references") + "[" + std::to_string(i) + "]";
    Reader rr(list[i], path);
    CalibrationReference ref;
    ref.name = AsString(rr.Need("name"), rr.Path("name"));
    ref.target = Rethrow(rr.Path("target"),
                         [&] { return ScenarioFromJson(rr.Need("target")); });
    ref.baseline = Rethrow(
        rr.Path("baseline"), [&] { return ScenarioFromJson(rr.Need("baseline")); });
    ref.measured_ratio =
        AsDouble(rr.Need("measured_ratio"), rr.Path("measured_ratio"));
    rr.Done();
    refs.push_back(std::move(ref));
  }
  r.Done();
  return refs;
}

CalibrationGrid GridFromJson(const Json& j) {
  Reader r(j, "grid");
  CalibrationGrid g;
  g.compute_efficiency =
      DoubleList(r.Need("compute_efficiency"), r.Path("compute_efficiency"));
  g.overlap = DoubleList(r.Need("overlap"), r.Path("overlap"));
  g.per_op_overhead_scale = DoubleList(r.Need("per_op_overhead_scale"),
                                       r.Path("per_op_overhead_scale"));
  g.host_processing_cost = DoubleList(r.Need("host_processing_cost"),
                                      r.Path("host_processing_cost"));
  if (const Json* v = r.Maybe("base")) {
    g.base = CoefficientsFromJson(*v, CalibrationCoefficients{});
  }
  r.Done();
  return g;
}

Json CostBreakdownToJson(const CostBreakdown& b) {
  Json stages = Json::object();
  for (size_t i = 0; i < kNumStages; ++i) {
    stages[std::string(StageName(static_cast<Stage>(i)))] = b.stages.seconds[i];
  }
  auto opt = [](const std::optional<double>& v) {
    return v ? Json(*v) : Json();
  };
  return {{"stages", stages},
          {"iteration_s", b.iteration_time},
          {"throughput", b.throughput},
          {"power_units", opt(b.power_units)},
          {"power_efficiency", opt(b.power_efficiency)},
          {"utilization",
           {{"cpu", b.utilization.cpu},
            {"host_bw", b.utilization.host_bw},
            {"gpu_bw", b.utilization.gpu_bw},
            {"nic", b.utilization.nic}}}};
}

Json PlanToJson(const PlacementPlan& plan) {
  Json shards = Json::array();
  for (const auto& s : plan.shards) {
    shards.push_back({{"table", s.table_id},
                      {"rows", {s.row_begin, s.row_end}},
                      {"device", s.location.Name()}});
  }
  Json devices = Json::array();
  for (const auto& d : plan.devices) {
    devices.push_back({{"device", d.location.Name()},
                       {"capacity", d.capacity},
                       {"bytes", d.bytes},
                       {"load", d.load}});
  }
  return {{"strategy", StrategyLabel(plan.strategy)},
          {"makespan", plan.Makespan()},
          {"shards", shards},
          {"devices", devices}};
}

std::vector<TableLoad> TableLoadsFromJson(const Json& j) {
  const Json* list = &j;
  std::optional<Reader> wrapper;
  if (j.is_object()) {
    wrapper.emplace(j, "tables");
    list = &wrapper->Need("tables");
    wrapper->Done();
  }
  std::vector<TableLoad> out;
  for (size_t i = 0; i < AsArray(*list, "tables").size(); ++i) {
    Reader r((*list)[i], "tables[" + std::to_string(i) + "]");
    TableLoad t;
    t.table_id = AsInt(r.Need("id"), r.Path("id"));
    t.size = AsUint(r.Need("size"), r.Path("size"));
    t.load = AsDouble(r.Need("load"), r.Path("load"));
    if (t.size == 0) Fail(r.Path("size"), "must be > 0");
    if (!(t.load >= 0) || !std::isfinite(t.load)) {
      Fail(r.Path("load"), "must be finite and >= 0");
    }
    r.Done();
    out.push_back(t);
  }
  return out;
}

std::vector<ShardDevice> ShardDevicesFromJson(const Json& j) {
  const Json* list = &j;
  std::optional<Reader> wrapper;
  if (j.is_object()) {
    wrapper.emplace(j, "devices");
    list = &wrapper->Need("devices");
    wrapper->Done();
  }
  std::vector<ShardDevice> out;
  for (size_t i = 0; i < AsArray(*list, "devices").size(); ++i) {
    Reader r((*list)[i], "devices[" + std::to_string(i) + "]");
    ShardDevice d;
    d.id = AsInt(r.Need("id"), r.Path("id"));
    d.capacity = AsUint(r.Need("capacity"), r.Path("capacity"));
    r.Done();
    out.push_back(d);
  }
  return out;
}

Json AssignmentToJson(const std::vector<TableLoad>& tables,
                      const std::vector<ShardDevice>& devices,
                      const ShardAssignment& a, std::string_view strategy) {
  Json assignments = Json::array();
  for (size_t i = 0; i < tables.size(); ++i) {
    assignments.push_back(
        {{"table", tables[i].table_id}, {"device", devices[a.device_of[i]].id}});
  }
  Json per_device = Json::array();
  for (size_t d = 0; d < devices.size(); ++d) {
    per_device.push_back({{"id", devices[d].id},
                          {"capacity", devices[d].capacity},
                          {"bytes", a.device_bytes[d]},
                          {"load", a.device_load[d]}});
  }
  return {{"strategy", std::string(strategy)},
          {"makespan", a.makespan},
          {"assignments", assignments},
          {"devices", per_device}};
}

}  // namespace recshard
