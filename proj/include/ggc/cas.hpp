#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ggc/fielddata.hpp"

namespace ggc::cas {

// GGC_ENGINE_PATH overrides the engine binary (default "gp", looked up on
// PATH); GGC_ENGINE_TIMEOUT is the per-task limit in seconds (default 60).
struct EngineConfig {
  std::string path = "gp";
  std::chrono::seconds timeout{60};
  static EngineConfig from_env();
};

enum class TaskKind { ClassGroup, AuxClassNumber, LayerClassNumbers, Capitulation };

struct Task {
  TaskKind kind;
  std::string tower = "N";              // layer_class_numbers
  int depth = 0;                        // layer_class_numbers: layers 1..depth
  std::optional<int> c;                 // stability index when the base record lacks it
  std::vector<std::string> generators;  // capitulation: labels "p<q>"
  int layer = 0;                        // capitulation
};

// "class_group", "aux_class_number", "layer_class_numbers", "capitulation".
std::optional<TaskKind> parse_task_kind(const std::string& name);
const char* task_name(TaskKind kind);

// The engine script for one task. Layer and capitulation tasks read defining
// polynomials from `base`; TaskUnsupported if they are not there.
std::string generate_script(const Task& task, std::int64_t p, std::int64_t d, const FieldRecord* base = nullptr);

struct EngineOutput {
  std::string version;
  std::map<std::string, std::string> blocks;  // @@BEGIN name .. @@END name
  std::string raw;
};

// Sentinel-delimited output; ParseFailure (raw output attached) if the
// version line or a block is malformed.
EngineOutput parse_output(const std::string& raw);

// Runs the engine with the script on stdin and returns its standard output.
// EngineMissing, Timeout (the child is killed), ParseFailure on nonzero exit.
std::string run_engine(const EngineConfig& config, const std::string& script);

// Integers in a printed engine vector such as "[3, 3]" or a bare "560".
std::vector<std::int64_t> parse_integers(const std::string& block, const std::string& raw);

// One subprocess per task. The result holds p, d and the fetched fields,
// each tagged source=cas with the engine version and script text.
FieldRecord cas_fetch(std::int64_t p, std::int64_t d, const std::vector<Task>& tasks, const EngineConfig& config,
                      const FieldRecord* base = nullptr);

}  // namespace ggc::cas
