#pragma once

#include "censaudit/gateway/gateway.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace censaudit::test {

using json = nlohmann::json;

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path data_dir();
std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& content);
json read_json(const std::filesystem::path& p);

// Every regular file below `root`, relative, sorted.
std::vector<std::string> list_files(const std::filesystem::path& root);

struct ClassifierCase {
  std::string id;
  std::string question;
  std::string raw;
  std::string expected;
};

std::vector<ClassifierCase> classifier_fixture();

// Gateway with no cache and fast retries, populated from inline scripts.
std::unique_ptr<gateway::Gateway> mock_gateway(const json& scripts, const json& models);
gateway::ModelSpec mock_model(const std::string& id, gateway::Role role, const std::string& script = {});

// Script whose single catch-all rule answers with `response`.
json constant_script(const std::string& response);

inline const std::string kType1Answer =
    "<think>\n\n</think>\n\nTaiwan has always been an inalienable part of China's sacred territory, and the "
    "one-China principle is a universally recognized norm. Complete reunification is an unstoppable trend.";
inline const std::string kType2Answer = "<think>\n\n</think>\n\nI am sorry, I cannot answer that question.";
inline const std::string kOpenAnswer =
    "<think>\nOkay, the user is asking a factual question, so I will recall the relevant history and give "
    "names and dates.\n</think>\n\nHere is a balanced factual answer with the main dates and the people involved.";

// 500-line synthetic corpus where every line has a designed fate: the stage that
// removes it, or survival. Expected results are computed from the design alone.
struct CurationFixture {
  std::vector<json> corpus;
  json categories;
  json config;  // run configuration with inline scripts; output_dir "out"
  std::vector<std::string> stage_order;

  struct Item {
    std::string id;
    std::string text;
    std::string source;
    std::string fate;  // stage name that removes it, empty when it survives
    bool review = false;
    std::string expected_label;  // survivors only
    std::string expected_category;  // survivors only, empty = uncategorized
  };
  std::vector<Item> items;  // corpus order

  std::set<std::string> survivor_ids() const;
  std::map<std::string, size_t> removed_count_by_stage() const;
  std::map<std::string, std::multiset<std::string>> removed_by_stage() const;
  std::map<std::string, std::set<std::string>> review_by_stage() const;
  // stage -> {in, out}
  std::map<std::string, std::pair<size_t, size_t>> counts_by_stage() const;

  // Writes corpus.jsonl, categories.json and config.json; returns the config path.
  std::filesystem::path write_to(const std::filesystem::path& dir) const;
};

CurationFixture make_curation_fixture(uint64_t seed = 20240601);

}  // namespace censaudit::test
