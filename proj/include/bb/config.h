#pragma once

#include <memory>
#include <optional>
#include <string>

#include "bb/gateway.h"
#include "bb/pipeline.h"

namespace bb {

struct AppConfig {
  std::string corpus_path;
  std::string use_cases_path;     // optional
  std::string model_runs_path;    // optional
  std::string shorthand_path;     // optional item_id -> shorthand table
  std::string lexical_index_path;  // optional prebuilt indexes
  std::string lexical_shorthand_index_path;
  std::string dense_index_path;
  std::string dense_shorthand_index_path;
  GatewayConfig completion;
  GatewayConfig embedding;
  RetrievalConfig retrieval;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t server_threads = 8;
};

// Parses a JSON config. Relative paths resolve against `base_dir`. Environment
// variables (BB_MODE, BB_LM_*, BB_EMBED_*) are applied on top.
AppConfig parse_app_config(std::string_view text, const std::string& base_dir = ".");
AppConfig load_app_config(const std::string& path);

// One gateway block ({"mode", "endpoint", ...}); empty text means defaults.
// Environment variables are applied on top.
GatewayConfig gateway_config_from_json(std::string_view text, GatewayKind kind);

// Loads every referenced file and builds missing indexes.
std::shared_ptr<Engine> make_engine(const AppConfig& config);

}  // namespace bb
