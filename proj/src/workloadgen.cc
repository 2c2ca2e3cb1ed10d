/*
 * Copyright 2026 The fgml Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fgml/workloadgen.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "json.hpp"

namespace fgml {

namespace {

// caller -> weighted callees.
const std::map<std::string, WeightedNames>& CallTable() {
  static const auto* table = new std::map<std::string, WeightedNames>{
      // Reads.
      {"ksys_read", {{"vfs_read", 1}}},
      {"vfs_read", {{"rw_verify_area", 1}, {"__vfs_read", 2}, {"fsnotify", 1}}},
      {"__vfs_read", {{"ext4_file_read_iter", 1}}},
      {"ext4_file_read_iter", {{"generic_file_read_iter", 1}}},
      {"generic_file_read_iter",
       {{"pagecache_get_page", 2},
        {"copy_page_to_iter", 2},
        {"touch_atime", 0.5},
        {"mark_page_accessed", 1},
        {"unlock_page", 0.5}}},
      {"pagecache_get_page", {{"find_get_entry", 1}, {"_raw_spin_lock", 0.3}}},
      {"touch_atime", {{"atime_needs_update", 1}}},
      // Writes.
      {"ksys_write", {{"vfs_write", 1}}},
      {"vfs_write",
       {{"rw_verify_area", 1}, {"ext4_file_write_iter", 2}, {"fsnotify", 1}}},
      {"ext4_file_write_iter",
       {{"generic_perform_write", 2},
        {"mutex_lock", 0.5},
        {"mutex_unlock", 0.5},
        {"file_update_time", 0.5}}},
      {"generic_perform_write",
       {{"ext4_da_write_begin", 1},
        {"copy_page_from_iter", 1},
        {"ext4_da_write_end", 1},
        {"balance_dirty_pages_ratelimited", 0.5}}},
      {"ext4_da_write_begin",
       {{"grab_cache_page_write_begin", 1}, {"unlock_page", 0.3}}},
      {"ext4_da_write_end",
       {{"block_write_end", 1}, {"unlock_page", 1}, {"crypto_shash_update", 0.15}}},
      {"file_update_time", {{"current_time", 1}}},
      // Memory management.
      {"do_munmap", {{"unmap_region", 1}, {"remove_vma", 1}}},
      {"unmap_region",
       {{"unmap_vmas", 1}, {"free_pgtables", 1}, {"tlb_finish_mmu", 1}}},
      {"tlb_finish_mmu", {{"release_pages", 1}, {"free_unref_page_list", 0.5}}},
      {"release_pages", {{"free_unref_page_list", 1}}},
      {"free_pgtables", {{"unlink_anon_vmas", 1}, {"unlink_file_vma", 1}}},
      {"unlink_file_vma", {{"vma_interval_tree_remove", 1}}},
      {"remove_vma",
       {{"special_mapping_close", 0.3},
        {"untrack_pfn", 0.5},
        {"kmem_cache_free", 1}}},
      {"exit_mmap",
       {{"unmap_vmas", 1},
        {"free_pgtables", 1},
        {"mm_put_huge_zero_page", 1},
        {"remove_vma", 2},
        {"tlb_finish_mmu", 1}}},
      {"unmap_vmas", {{"unmap_page_range", 1}, {"untrack_pfn", 0.5}}},
      {"unmap_page_range", {{"page_remove_rmap", 1}, {"_raw_spin_lock", 0.5}}},
      {"handle_mm_fault", {{"__handle_mm_fault", 1}}},
      {"__handle_mm_fault", {{"do_anonymous_page", 1}, {"_raw_spin_lock", 0.3}}},
      {"do_anonymous_page",
       {{"alloc_pages_vma", 1}, {"page_add_new_anon_rmap", 1}}},
      {"alloc_pages_vma", {{"__alloc_pages_nodemask", 1}}},
      {"__alloc_pages_nodemask",
       {{"get_page_from_freelist", 1}, {"kernel_poison_pages", 0.5}}},
      // Scheduling and process bookkeeping.
      {"schedule", {{"__schedule", 1}}},
      {"__schedule",
       {{"pick_next_task_fair", 1},
        {"update_curr", 1},
        {"_raw_spin_lock", 1},
        {"finish_task_switch", 1}}},
      {"try_to_wake_up",
       {{"select_task_rq_fair", 1},
        {"ttwu_do_activate", 1},
        {"native_smp_send_reschedule", 0.5},
        {"_raw_spin_lock", 0.5}}},
      {"native_smp_send_reschedule", {{"x2apic_send_IPI", 1}}},
      {"__task_pid_nr_ns", {{"task_active_pid_ns", 1}}},
      {"task_work_run", {{"task_work_add", 0.5}, {"fput", 1}}},
      // Crypto API.
      {"crypto_skcipher_encrypt",
       {{"skcipher_walk_virt", 1}, {"crypto_cbc_encrypt", 1}, {"chacha_crypt", 1}}},
      {"crypto_cbc_encrypt",
       {{"aes_encrypt", 3}, {"crypto_xor", 2}, {"skcipher_walk_done", 1}}},
      {"aes_encrypt", {{"crypto_xor", 1}, {"aesni_enc", 1}}},
      {"chacha_crypt",
       {{"chacha_block", 3}, {"crypto_xor", 2}, {"skcipher_walk_done", 1}}},
      {"chacha_block", {{"chacha_permute", 1}, {"crypto_xor", 0.5}}},
      {"skcipher_walk_virt", {{"skcipher_walk_first", 1}}},
      {"skcipher_walk_first", {{"skcipher_walk_next", 1}}},
      {"skcipher_walk_done", {{"skcipher_walk_next", 1}, {"skcipher_unmap_dst", 1}}},
      {"skcipher_walk_next", {{"skcipher_next_fast", 1}}},
      {"crypto_shash_update",
       {{"sha256_update", 1}, {"crc32c_pcl_intel_update", 1}}},
      {"sha256_update", {{"sha256_transform_blocks", 2}, {"crypto_xor", 0.2}}},
      {"sha256_transform_blocks", {{"sha256_transform", 2}}},
      {"crypto_alloc_skcipher", {{"crypto_alloc_tfm", 1}}},
      {"crypto_alloc_tfm", {{"crypto_find_alg", 1}, {"crypto_create_tfm", 1}}},
      {"crypto_find_alg", {{"crypto_alg_mod_lookup", 1}}},
      {"crypto_create_tfm", {{"__kmalloc", 1}, {"crypto_skcipher_init_tfm", 1}}},
      {"aes_expandkey", {{"aes_key_rotate", 2}, {"aes_sub_word", 2}}},
      {"aes_key_rotate", {{"aes_sub_word", 1}}},
  };
  return *table;
}

// Median self/leaf duration in microseconds; 0.2 when absent.
double MedianUs(const std::string& name) {
  static const auto* medians = new std::map<std::string, double>{
      {"copy_page_to_iter", 1.2},   {"copy_page_from_iter", 1.4},
      {"aesni_enc", 2.5},           {"crypto_xor", 0.4},
      {"chacha_permute", 1.8},      {"sha256_transform", 1.5},
      {"crc32c_pcl_intel_update", 0.5},
      {"aes_sub_word", 0.3},        {"find_get_entry", 0.3},
      {"get_page_from_freelist", 0.6},
      {"kernel_poison_pages", 0.9}, {"free_unref_page_list", 0.7},
      {"page_remove_rmap", 0.3},    {"x2apic_send_IPI", 0.4},
      {"pick_next_task_fair", 0.5}, {"finish_task_switch", 0.4},
      {"fsnotify", 0.25},           {"__kmalloc", 0.35},
  };
  auto it = medians->find(name);
  return it == medians->end() ? 0.2 : it->second;
}

struct Node {
  std::string name;
  int64_t start_ns = 0;
  int64_t end_ns = 0;
  std::vector<Node> children;
};

class TraceBuilder {
 public:
  TraceBuilder(const WorkloadProfile& profile, Rng* rng)
      : profile_(profile), rng_(rng) {}

  const std::string& PickWeighted(const WeightedNames& names,
                                  bool apply_overrides) {
    double total = 0.0;
    for (const auto& [name, w] : names) total += Weight(name, w, apply_overrides);
    double u = rng_->Uniform() * total;
    for (const auto& [name, w] : names) {
      u -= Weight(name, w, apply_overrides);
      if (u < 0.0) return name;
    }
    for (auto it = names.rbegin(); it != names.rend(); ++it) {
      if (Weight(it->first, it->second, apply_overrides) > 0.0) return it->first;
    }
    return names.back().first;
  }

  Node Call(const std::string& name, int depth, int64_t start) {
    Node node;
    node.name = name;
    node.start_ns = start;
    const WeightedNames* callees = Callees(name);
    if (callees == nullptr || depth + 1 >= profile_.max_depth) {
      node.end_ns = start + DurationNs(MedianUs(name));
      return node;
    }
    int span = profile_.max_children - profile_.min_children + 1;
    int k = profile_.min_children +
            static_cast<int>(rng_->UniformInt(static_cast<uint64_t>(span)));
    int64_t t = start + DurationNs(0.08);
    for (int i = 0; i < k; ++i) {
      const std::string& child = PickWeighted(*callees, true);
      node.children.push_back(Call(child, depth + 1, t));
      t = node.children.back().end_ns + DurationNs(0.03);
    }
    node.end_ns = t + DurationNs(0.06);
    return node;
  }

  Node CycleCall(const std::string& parent, const std::string& child,
                 int64_t start) {
    Node node;
    node.name = parent;
    node.start_ns = start;
    Node leaf;
    leaf.name = child;
    leaf.start_ns = start + DurationNs(0.08);
    leaf.end_ns = leaf.start_ns + DurationNs(0.5);
    node.end_ns = leaf.end_ns + DurationNs(0.06);
    node.children.push_back(std::move(leaf));
    return node;
  }

  // Log-normal duration, at least 1 ns, integral nanoseconds.
  int64_t DurationNs(double median_us) {
    double us = rng_->LogNormal(median_us * profile_.duration_scale,
                                profile_.duration_sigma);
    return std::max<int64_t>(1, static_cast<int64_t>(std::llround(us * 1000.0)));
  }

 private:
  double Weight(const std::string& name, double w, bool apply_overrides) const {
    if (!apply_overrides) return w;
    auto it = profile_.callee_weights.find(name);
    return it == profile_.callee_weights.end() ? w : w * it->second;
  }

  const WeightedNames* Callees(const std::string& name) const {
    auto it = CallTable().find(name);
    if (it == CallTable().end()) return nullptr;
    double total = 0.0;
    for (const auto& [callee, w] : it->second) total += Weight(callee, w, true);
    return total > 0.0 ? &it->second : nullptr;
  }

  const WorkloadProfile& profile_;
  Rng* rng_;
};

char OverheadMarker(int64_t ns) {
  if (ns > 1'000'000'000) return '$';
  if (ns > 100'000'000) return '@';
  if (ns > 10'000'000) return '*';
  if (ns > 1'000'000) return '#';
  if (ns > 100'000) return '!';
  if (ns > 10'000) return '+';
  return ' ';
}

struct TimedLine {
  int64_t time_ns;
  int cpu;
  size_t seq;
  RawLine line;
};

void EmitNode(const Node& node, int cpu, int depth, std::vector<TimedLine>* out,
              GeneratorBookkeeping* book) {
  ++book->calls[node.name];
  ++book->total_calls;
  RawLine line;
  line.cpu = cpu;
  line.depth = depth;
  line.name = node.name;
  const int64_t dur = node.end_ns - node.start_ns;
  if (node.children.empty()) {
    line.kind = BodyKind::kLeaf;
    line.duration_us = static_cast<double>(dur) / 1000.0;
    char m = OverheadMarker(dur);
    if (m != ' ') line.overhead_marker = m;
    line.abstime = static_cast<double>(node.start_ns) * 1e-9;
    out->push_back({node.start_ns, cpu, out->size(), std::move(line)});
    return;
  }
  line.kind = BodyKind::kEntry;
  line.abstime = static_cast<double>(node.start_ns) * 1e-9;
  out->push_back({node.start_ns, cpu, out->size(), line});
  for (const auto& child : node.children) {
    EmitNode(child, cpu, depth + 1, out, book);
  }
  RawLine exit;
  exit.kind = BodyKind::kExit;
  exit.cpu = cpu;
  exit.depth = depth;
  exit.name = node.name;
  exit.duration_us = static_cast<double>(dur) / 1000.0;
  char m = OverheadMarker(dur);
  if (m != ' ') exit.overhead_marker = m;
  exit.abstime = static_cast<double>(node.end_ns) * 1e-9;
  out->push_back({node.end_ns, cpu, out->size(), std::move(exit)});
}

int64_t LogNormalCount(Rng& rng, double median, double sigma) {
  if (median <= 0.0) return 0;
  return std::max<int64_t>(0, std::llround(rng.LogNormal(median, sigma)));
}

}  // namespace

GeneratedTrace GenerateTrace(const WorkloadProfile& profile, uint64_t seed,
                             int n_root_calls, const GeneratorOptions& options) {
  Rng rng(seed);
  TraceBuilder builder(profile, &rng);
  const int n_cpus = std::max(1, options.n_cpus);

  // Root call names in emission order.
  std::vector<std::pair<std::string, std::string>> roots;  // (root, cycle child)
  if (profile.structure == TraceStructure::kCallTable) {
    for (int i = 0; i < n_root_calls; ++i) {
      bool crypto = !profile.crypto_roots.empty() &&
                    rng.Bernoulli(profile.crypto_intensity);
      roots.emplace_back(
          builder.PickWeighted(crypto ? profile.crypto_roots : profile.roots,
                               false),
          "");
    }
  } else if (!profile.cycle_pool.empty() && n_root_calls > 0) {
    const size_t cycle =
        profile.structure == TraceStructure::kTriangles ? 3 : 6;
    std::vector<std::string> pool = profile.cycle_pool;
    rng.Shuffle(pool);
    const size_t groups = pool.size() / cycle;
    const int reps =
        std::max(1, n_root_calls / static_cast<int>(groups * cycle));
    for (int r = 0; r < reps; ++r) {
      std::vector<std::pair<std::string, std::string>> batch;
      for (size_t g = 0; g < groups; ++g) {
        for (size_t i = 0; i < cycle; ++i) {
          batch.emplace_back(pool[g * cycle + i],
                             pool[g * cycle + (i + 1) % cycle]);
        }
      }
      rng.Shuffle(batch);
      roots.insert(roots.end(), batch.begin(), batch.end());
    }
  }

  GeneratedTrace out;
  std::vector<TimedLine> lines;
  std::vector<int64_t> clock(n_cpus);
  for (int c = 0; c < n_cpus; ++c) {
    clock[c] = 100'000'000'000LL + 1'000'000LL * c;
  }
  for (const auto& [root, child] : roots) {
    int cpu = n_cpus == 1 ? 0 : static_cast<int>(rng.UniformInt(n_cpus));
    int64_t start = clock[cpu] + builder.DurationNs(profile.gap_median_us);
    Node node = child.empty() ? builder.Call(root, 0, start)
                              : builder.CycleCall(root, child, start);
    clock[cpu] = node.end_ns;
    EmitNode(node, cpu, 0, &lines, &out.bookkeeping);
  }
  std::stable_sort(lines.begin(), lines.end(),
                   [](const TimedLine& a, const TimedLine& b) {
                     if (a.time_ns != b.time_ns) return a.time_ns < b.time_ns;
                     if (a.cpu != b.cpu) return a.cpu < b.cpu;
                     return a.seq < b.seq;
                   });

  LineFormat format;
  format.abstime = options.abstime;
  format.comm_pid = options.comm_pid;
  format.comm = profile.name.substr(0, 12) + "-" +
                std::to_string(1000 + seed % 30000);
  std::string& text = out.text;
  text += "# tracer: function_graph\n#\n";
  text += options.abstime ? "#     TIME        CPU  DURATION                  "
                            "FUNCTION CALLS\n"
                          : "# CPU  DURATION                  FUNCTION CALLS\n";
  text += "#      |          |     |   |                     |   |   |   |\n";
  for (auto& tl : lines) {
    if (!options.abstime) tl.line.abstime.reset();
    text += FormatLine(tl.line, format);
    text += '\n';
  }

  IoMeta io;
  io.read_count = LogNormalCount(rng, profile.io.read_ops_median, profile.io.sigma);
  io.write_count =
      LogNormalCount(rng, profile.io.write_ops_median, profile.io.sigma);
  io.read_bytes = static_cast<int64_t>(std::llround(
      static_cast<double>(io.read_count) * profile.io.bytes_per_op *
      rng.LogNormal(1.0, 0.1)));
  io.write_bytes = static_cast<int64_t>(std::llround(
      static_cast<double>(io.write_count) * profile.io.bytes_per_op *
      rng.LogNormal(1.0, 0.1)));
  out.io = io;
  out.bookkeeping.io = io;
  out.sidecar_json = SidecarJson(io, profile.label(), profile.name);
  return out;
}

GeneratedTrace GenerateTrace(const WorkloadProfile& profile, uint64_t seed,
                             const GeneratorOptions& options) {
  Rng rng(DeriveSeed(seed, "root_calls"));
  int span = std::max(1, profile.max_root_calls - profile.min_root_calls + 1);
  int n = profile.min_root_calls + static_cast<int>(rng.UniformInt(span));
  return GenerateTrace(profile, seed, n, options);
}

namespace {

WorkloadProfile PlainBase(const std::string& name) {
  WorkloadProfile p;
  p.name = name;
  p.roots = {{"ksys_read", 3},        {"ksys_write", 3},
             {"do_munmap", 0.7},      {"exit_mmap", 0.3},
             {"handle_mm_fault", 1},  {"schedule", 1},
             {"try_to_wake_up", 0.6}, {"__task_pid_nr_ns", 0.4},
             {"task_work_run", 0.4}};
  // Plain workloads only reach the crypto API through ext4 checksums.
  p.callee_weights = {{"sha256_update", 0.0}};
  p.io = {120.0, 110.0, 4096.0, 0.35};
  return p;
}

WorkloadProfile CryptoBase(const std::string& name) {
  WorkloadProfile p = PlainBase(name);
  p.crypto_roots = {{"crypto_skcipher_encrypt", 6},
                    {"crypto_shash_update", 2},
                    {"aes_expandkey", 1},
                    {"crypto_alloc_skcipher", 1}};
  p.crypto_intensity = 0.45;
  p.callee_weights = {};
  p.max_depth = 6;
  p.max_children = 4;
  p.duration_scale = 1.15;
  p.gap_median_us = 2.4;
  p.io = {120.0, 135.0, 4096.0, 0.35};
  return p;
}

}  // namespace

std::vector<WorkloadProfile> ProfileSet(const std::string& name) {
  if (name == "default2") {
    return {CryptoBase("crypto"), PlainBase("plain")};
  }
  if (name == "graphsignal2") {
    const std::vector<std::string> pool = {
        "task_active_pid_ns", "mm_put_huge_zero_page", "special_mapping_close",
        "untrack_pfn",        "vma_interval_tree_remove", "free_unref_page_list",
        "fsnotify",           "unlink_anon_vmas",      "x2apic_send_IPI",
        "task_work_add",      "kernel_poison_pages",   "unlock_page"};
    WorkloadProfile tri;
    tri.name = "triangles";
    tri.structure = TraceStructure::kTriangles;
    tri.cycle_pool = pool;
    tri.crypto_intensity = 1.0;
    tri.min_root_calls = 36;
    tri.max_root_calls = 72;
    tri.io = {120.0, 120.0, 4096.0, 0.35};
    WorkloadProfile hex = tri;
    hex.name = "hexagons";
    hex.structure = TraceStructure::kHexagons;
    hex.crypto_intensity = 0.0;
    return {tri, hex};
  }
  if (name == "tasks6") {
    WorkloadProfile aes = CryptoBase("aes_encrypt");
    aes.crypto_roots = {{"crypto_skcipher_encrypt", 6}, {"aes_expandkey", 1}};
    aes.callee_weights = {{"chacha_crypt", 0.0}, {"sha256_update", 0.0}};

    WorkloadProfile chacha = CryptoBase("chacha_encrypt");
    chacha.crypto_roots = {{"crypto_skcipher_encrypt", 6},
                           {"crypto_alloc_skcipher", 1}};
    chacha.callee_weights = {{"crypto_cbc_encrypt", 0.0}, {"sha256_update", 0.0}};

    WorkloadProfile sha = CryptoBase("sha_hash");
    sha.crypto_roots = {{"crypto_shash_update", 1}};
    sha.crypto_intensity = 0.35;
    sha.callee_weights = {{"crc32c_pcl_intel_update", 0.2}};
    sha.roots = {{"ksys_read", 5}, {"schedule", 1}, {"handle_mm_fault", 1}};
    sha.io = {150.0, 5.0, 4096.0, 0.35};

    WorkloadProfile copy = PlainBase("file_copy");
    copy.roots = {{"ksys_read", 4}, {"ksys_write", 4}, {"schedule", 1},
                  {"try_to_wake_up", 0.5}};

    WorkloadProfile read = PlainBase("file_read");
    read.roots = {{"ksys_read", 6}, {"schedule", 1}, {"__task_pid_nr_ns", 0.5}};
    read.io = {160.0, 4.0, 4096.0, 0.35};

    WorkloadProfile mmap = PlainBase("mmap_churn");
    mmap.roots = {{"do_munmap", 2},       {"exit_mmap", 1},
                  {"handle_mm_fault", 3}, {"schedule", 1},
                  {"task_work_run", 1}};
    mmap.io = {20.0, 10.0, 4096.0, 0.35};
    return {aes, chacha, sha, copy, read, mmap};
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown profile set '" + name + "'");
}

std::vector<std::string> ProfileSetNames() {
  return {"default2", "graphsignal2", "tasks6"};
}

std::vector<std::string> CallTableFunctions() {
  std::set<std::string> names;
  for (const auto& [caller, callees] : CallTable()) {
    names.insert(caller);
    for (const auto& [callee, w] : callees) names.insert(callee);
  }
  return {names.begin(), names.end()};
}

std::vector<GeneratedSample> GenerateCorpusInMemory(
    const std::vector<WorkloadProfile>& profiles, int per_profile_count,
    uint64_t seed, const GeneratorOptions& options) {
  if (per_profile_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "per_profile_count must be >= 1");
  }
  std::vector<GeneratedSample> out;
  for (const auto& profile : profiles) {
    for (int i = 0; i < per_profile_count; ++i) {
      uint64_t file_seed = DeriveSeed(seed, profile.name, i);
      GeneratedSample s;
      s.trace = GenerateTrace(profile, file_seed, options);
      s.entry.task = profile.name;
      s.entry.label = profile.label();
      s.entry.seed = file_seed;
      s.entry.trace = profile.name + "/" + std::to_string(file_seed) + ".trace";
      s.entry.sidecar =
          profile.name + "/" + std::to_string(file_seed) + ".io.json";
      Fnv1a h;
      h.Update(s.trace.text);
      s.entry.digest = h.hex();
      s.entry.total_calls = s.trace.bookkeeping.total_calls;
      out.push_back(std::move(s));
    }
  }
  return out;
}

CorpusManifest GenerateCorpus(const std::vector<WorkloadProfile>& profiles,
                              int per_profile_count, uint64_t seed,
                              const std::string& dir,
                              const GeneratorOptions& options,
                              const std::string& profile_set) {
  namespace fs = std::filesystem;
  CorpusManifest manifest;
  manifest.seed = seed;
  manifest.profile_set = profile_set;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir);
  for (const auto& profile : profiles) {
    fs::create_directories(fs::path(dir) / profile.name, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create corpus subdir");
  }
  for (auto& s : GenerateCorpusInMemory(profiles, per_profile_count, seed,
                                        options)) {
    WriteFile((fs::path(dir) / s.entry.trace).string(), s.trace.text);
    WriteFile((fs::path(dir) / s.entry.sidecar).string(),
              s.trace.sidecar_json);
    manifest.entries.push_back(std::move(s.entry));
  }
  WriteFile((fs::path(dir) / "manifest.json").string(), ManifestJson(manifest));
  return manifest;
}

std::string ManifestJson(const CorpusManifest& manifest) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["seed"] = manifest.seed;
  j["profile_set"] = manifest.profile_set;
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"trace", e.trace},
                       {"sidecar", e.sidecar},
                       {"task", e.task},
                       {"label", e.label},
                       {"seed", e.seed},
                       {"digest", e.digest},
                       {"total_calls", e.total_calls}});
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

CorpusManifest ParseManifestJson(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    CorpusManifest m;
    m.seed = j.at("seed").get<uint64_t>();
    m.profile_set = j.value("profile_set", "custom");
    for (const auto& e : j.at("entries")) {
      ManifestEntry entry;
      entry.trace = e.at("trace").get<std::string>();
      entry.sidecar = e.at("sidecar").get<std::string>();
      entry.task = e.value("task", "");
      entry.label = e.value("label", 0);
      entry.seed = e.value("seed", uint64_t{0});
      entry.digest = e.value("digest", "");
      entry.total_calls = e.value("total_calls", int64_t{0});
      m.entries.push_back(std::move(entry));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIoError, std::string("bad manifest: ") + e.what());
  }
}

std::vector<TraceSample> LoadCorpus(const std::string& dir,
                                    const ParserOptions& options) {
  namespace fs = std::filesystem;
  CorpusManifest manifest =
      ParseManifestJson(ReadFile((fs::path(dir) / "manifest.json").string()));
  std::vector<TraceSample> out;
  out.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    TraceSample s =
        ParseTraceFile((fs::path(dir) / e.trace).string(), options);
    fs::path sidecar = fs::path(dir) / e.sidecar;
    if (fs::exists(sidecar)) {
      ApplySidecar(ReadFile(sidecar.string()), s);
    } else {
      s.label = e.label;
      s.task = e.task;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace fgml
