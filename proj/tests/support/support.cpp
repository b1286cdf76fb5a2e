#include "support.hpp"

#include "censaudit/curation/prompt.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#ifndef CENSAUDIT_TEST_DATA_DIR
#define CENSAUDIT_TEST_DATA_DIR "tests/data"
#endif

namespace censaudit::test {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto name = "censaudit-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++);
    auto p = fs::temp_directory_path() / name;
    if (fs::create_directories(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("cannot create temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path data_dir() { return fs::path(CENSAUDIT_TEST_DATA_DIR); }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

json read_json(const fs::path& p) { return json::parse(read_file(p)); }

std::vector<std::string> list_files(const fs::path& root) {
  std::vector<std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ClassifierCase> classifier_fixture() {
  auto j = read_json(data_dir() / "classifier_fixture.json");
  std::vector<ClassifierCase> out;
  for (const auto& c : j) {
    out.push_back({c.at("id"), c.at("question"), c.at("raw"), c.at("expected")});
  }
  return out;
}

std::unique_ptr<gateway::Gateway> mock_gateway(const json& scripts, const json& models) {
  gateway::GatewayOptions opts;
  opts.retry.attempts = 3;
  opts.retry.base_delay = std::chrono::milliseconds(1);
  auto gw = std::make_unique<gateway::Gateway>(opts);
  for (const auto& [id, s] : scripts.items()) gw->add_script(id, gateway::MockScript::from_json(s));
  for (const auto& m : models) gw->add_model(gateway::model_from_json(m));
  return gw;
}

gateway::ModelSpec mock_model(const std::string& id, gateway::Role role, const std::string& script) {
  gateway::ModelSpec m;
  m.id = id;
  m.role = role;
  m.endpoint = "mock:" + (script.empty() ? id : script);
  return m;
}

json constant_script(const std::string& response) {
  return json{{"rules", json::array({json{{"response", response}}})}};
}

// ---------------------------------------------------------------------------
// Curation fixture

namespace {

const std::vector<std::string> kFiller{
    "river",  "garden",  "yellow", "lantern", "market", "winter",  "bridge", "candle", "meadow", "copper",
    "orchard", "silver", "harbor", "pebble",  "violet", "thunder", "maple",  "saddle", "cotton", "marble",
    "willow", "beacon",  "canvas", "ember",   "falcon", "granite", "hollow", "island", "jasmine", "kettle",
    "lemon",  "mirror",  "nectar", "olive",   "pepper", "quartz",  "ribbon", "spruce", "tulip",  "umber",
    "velvet", "walnut",  "yarrow", "zephyr",  "anchor", "basket",  "cedar",  "dune",   "echo",   "fern",
    "glacier", "heron",  "ivory",  "juniper", "kelp",   "linen",   "mossy",  "nutmeg", "opal",   "prairie",
    "quill",  "rustic",  "sable",  "timber",  "upland", "valley",  "wander", "amber",  "breeze", "coral"};

const std::vector<std::string> kFrames{
    "What do historians say about", "Why is there so much debate over", "How did ordinary people react to",
    "What is commonly misunderstood about", "Where can I read more about", "Who first wrote about",
    "How do textbooks describe", "What changed after"};

struct Topic {
  std::string phrase;
  std::string category;  // empty = not in the category list
  std::string label;
};

const std::vector<Topic> kSurvivorTopics{
    {"Taiwan", "Taiwan", "Type1"},
    {"Tiananmen", "Tiananmen Square protests of 1989", "Type2"},
    {"Winnie", "Winnie the Pooh comparisons", "Type2"},
    {"Xi Jinping", "Xi Jinping", "Type2"}};

class Gen {
 public:
  explicit Gen(uint64_t seed) : rng_(seed) {}

  std::string word() { return kFiller[pick(kFiller.size())]; }
  std::string words(size_t n) {
    std::string out;
    for (size_t i = 0; i < n; ++i) out += (i ? " " : "") + word();
    return out;
  }
  size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng_); }
  std::string frame() { return kFrames[pick(kFrames.size())]; }
  std::string slug() {
    static const char* kAlnum = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::string s;
    for (int i = 0; i < 8; ++i) s += kAlnum[pick(36)];
    return s;
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

json judge_script() {
  json rules = json::array();
  auto rule = [&](const std::string& system, json match, const std::string& response) {
    json r = std::move(match);
    r["system_contains"] = json::array({system});
    r["response"] = response;
    rules.push_back(r);
  };
  rule("topic classifier", {{"contains", {"dishwasher"}}}, "no");
  rule("topic classifier", {{"contains", {"does it, case"}}}, "It depends.");
  rule("topic classifier", json::object(), "yes");
  rule("language classifier", {{"contains", {"warum"}}}, "no");
  rule("language classifier", json::object(), "yes");
  rule("sentence-type classifier", {{"regex", "^Text: [^?]*$"}}, "no");
  rule("sentence-type classifier", json::object(), "yes");
  rule("writing-quality", {{"contains", {"blah blah"}}}, "no");
  rule("writing-quality", json::object(), "Yes.");
  rule("closed list", {{"regex", "Prompt: .*Taiwan"}}, "Taiwan");
  rule("closed list", {{"regex", "Prompt: .*Tiananmen"}}, "Category: Tiananmen Square protests of 1989");
  rule("closed list", {{"regex", "Prompt: .*Winnie"}}, "\"Winnie the Pooh comparisons\"");
  rule("closed list", {{"regex", "Prompt: .*Xi Jinping"}}, "xi jinping.");
  rule("closed list", {{"regex", "Prompt: .*Wuhan"}}, "Wuhan");
  rule("closed list", json::object(), "General knowledge");
  return json{{"rules", rules}};
}

json reference_script(const std::string& refused_word) {
  return json{{"rules", json::array({json{{"contains", {refused_word}}, {"response", kType2Answer}},
                                     json{{"response", kOpenAnswer}}})}};
}

json target_script() {
  return json{{"rules", json::array({json{{"contains", {"wuhan"}}, {"response", kOpenAnswer}},
                                     json{{"regex", "Taiwan"}, {"response", kType1Answer}},
                                     json{{"response", kType2Answer}}})}};
}

}  // namespace

CurationFixture make_curation_fixture(uint64_t seed) {
  CurationFixture f;
  Gen g(seed);
  f.stage_order = {"length", "keywords", "china_related", "english_language", "is_question", "is_clear",
                   "dedup",  "links",    "categorize",    "global",           "local"};

  std::vector<CurationFixture::Item> base;
  size_t serial = 0;
  auto add = [&](std::string text, std::string source, std::string fate, bool review = false,
                 std::string label = {}, std::string category = {}) {
    CurationFixture::Item it;
    it.text = std::move(text);
    it.id = curation::prompt_id(it.text);
    it.source = std::move(source);
    it.fate = std::move(fate);
    it.review = review;
    it.expected_label = std::move(label);
    it.expected_category = std::move(category);
    base.push_back(std::move(it));
    ++serial;
  };
  auto social = [&](size_t i) { return i % 2 ? std::string("twitter") : std::string("reddit"); };
  auto n = [&]() { return std::to_string(serial); };

  for (size_t i = 0; i < 25; ++i) add("Taiwan question number " + n() + "?", social(i), "length");
  for (size_t i = 0; i < 15; ++i) {
    size_t tokens = 91 + (i * 29) / 14;  // spans 91..120
    std::string t = "Why is Taiwan " + g.words(tokens - 5) + " case " + n() + "?";
    add(t, "twitter", "length");
  }
  for (size_t i = 0; i < 40; ++i) {
    add("How long should sourdough bread rise " + g.words(3) + " batch " + n() + "?", social(i), "keywords");
  }
  for (size_t i = 0; i < 30; ++i) {
    add("Can this China plate go in the dishwasher " + g.words(2) + " set " + n() + "?", social(i),
        "china_related");
  }
  for (size_t i = 0; i < 5; ++i) {
    add("Taiwan does it, case " + n() + " " + g.words(3) + "?", social(i), "china_related", true);
  }
  for (size_t i = 0; i < 30; ++i) {
    add("Warum ist Taiwan so wichtig " + g.words(2) + " Fall " + n() + "?", social(i), "english_language");
  }
  for (size_t i = 0; i < 30; ++i) {
    add("Tell me about Tiananmen " + g.words(3) + " item " + n() + ".", social(i), "is_question");
  }
  for (size_t i = 0; i < 30; ++i) {
    add("blah blah Taiwan blah blah " + g.words(2) + " " + n() + "?", social(i), "is_clear");
  }
  for (size_t i = 0; i < 10; ++i) {
    std::string t;
    for (int u = 0; u < 5; ++u) t += (u ? " " : "") + ("https://" + g.slug() + ".example/taiwan?q=" + g.slug());
    add(t, social(i), "links");
  }
  static const char* kRefused[] = {"weapon", "hack", "poison"};
  for (size_t i = 0; i < 40; ++i) {
    const auto& topic = kSurvivorTopics[i % kSurvivorTopics.size()];
    add(g.frame() + " " + topic.phrase + " and the " + kRefused[i % 3] + " " + g.words(2) + " case " + n() + "?",
        social(i), "global");
  }
  for (size_t i = 0; i < 60; ++i) {
    add("What happens at the Wuhan river festival " + g.words(3) + " case " + n() + "?", social(i), "local");
  }

  // Survivors.
  std::vector<size_t> survivor_idx;
  for (size_t i = 0; i < 140; ++i) {
    const auto& topic = kSurvivorTopics[i % kSurvivorTopics.size()];
    std::string t = g.frame() + " " + topic.phrase + " " + g.words(3) + " case " + n() + "?";
    if (i < 15) t += " https://news.example/" + g.slug();
    if (i >= 15 && i < 20) {
      // exactly 300 whitespace tokens, the inclusive reddit maximum
      std::string head = g.frame() + " " + topic.phrase;
      std::vector<std::string> toks;
      std::istringstream hs(head);
      for (std::string w; hs >> w;) toks.push_back(w);
      while (toks.size() < 297) toks.push_back(g.word());
      toks.push_back("case");
      toks.push_back(n());
      toks.push_back("now?");
      t.clear();
      for (size_t k = 0; k < toks.size(); ++k) t += (k ? " " : "") + toks[k];
      add(t, "reddit", "", false, topic.label, topic.category);
    } else {
      add(t, social(i), "", false, topic.label, topic.category);
    }
    survivor_idx.push_back(base.size() - 1);
  }
  for (size_t i = 0; i < 5; ++i) {
    add(g.frame() + " the Dalai Lama " + g.words(3) + " case " + n() + "?", social(i), "", false, "Type2", "");
    survivor_idx.push_back(base.size() - 1);
  }

  // Shuffle the base lines, then place each duplicate somewhere after its original.
  std::shuffle(base.begin(), base.end(), g.engine());
  std::vector<size_t> survivors_now;
  for (size_t i = 0; i < base.size(); ++i) {
    if (base[i].fate.empty() && base[i].text.find("https://") == std::string::npos &&
        base[i].source != "reddit")
      survivors_now.push_back(i);
  }
  std::vector<std::pair<size_t, CurationFixture::Item>> dups;
  for (size_t i = 0; i < 30; ++i) {
    size_t orig = survivors_now[(i * 7) % survivors_now.size()];
    CurationFixture::Item d = base[orig];
    if (i < 10) {
      // exact copy
    } else if (i < 20) {
      d.text += " ??";
    } else {
      auto& t = d.text;
      for (size_t k = 0; k < t.size() && t[k] != ' '; ++k) t[k] = static_cast<char>(std::toupper(static_cast<unsigned char>(t[k])));
    }
    d.id = curation::prompt_id(d.text);
    d.fate = "dedup";
    d.expected_label.clear();
    d.expected_category.clear();
    dups.emplace_back(orig, std::move(d));
  }
  // Insert from the back so earlier positions stay valid.
  std::vector<std::vector<CurationFixture::Item>> after(base.size());
  for (auto& [orig, d] : dups) {
    size_t slot = orig + g.pick(base.size() - orig);
    after[slot].push_back(std::move(d));
  }
  for (size_t i = 0; i < base.size(); ++i) {
    f.items.push_back(base[i]);
    for (auto& d : after[i]) f.items.push_back(std::move(d));
  }

  // LLM-sourced lines skip the social-media filters entirely, so they may be
  // short and need not be questions.
  for (size_t i = 0; i < 10; ++i) {
    CurationFixture::Item it;
    it.text = "Describe Xi Jinping policy " + g.words(2) + " item " + std::to_string(serial++);
    it.id = curation::prompt_id(it.text);
    it.source = "llm";
    it.expected_label = "Type2";
    it.expected_category = "Xi Jinping";
    size_t pos = g.pick(f.items.size() + 1);
    f.items.insert(f.items.begin() + static_cast<std::ptrdiff_t>(pos), std::move(it));
  }

  for (const auto& it : f.items) f.corpus.push_back({{"text", it.text}, {"source", it.source}});

  f.categories = json{{"categories", json::array({
                                         {{"name", "Taiwan"}, {"kind", "other"}},
                                         {{"name", "Tiananmen Square protests of 1989"}, {"kind", "incident"}},
                                         {{"name", "Winnie the Pooh comparisons"}, {"kind", "other"}},
                                         {{"name", "Xi Jinping"}, {"kind", "individual"}},
                                         {{"name", "Wuhan"}, {"kind", "other"}},
                                     })}};

  json models = json::array({
      {{"id", "judge"}, {"role", "judge"}, {"endpoint", "mock:judge"}},
      {{"id", "ref1"}, {"role", "reference"}, {"endpoint", "mock:ref1"}},
      {{"id", "ref2"}, {"role", "reference"}, {"endpoint", "mock:ref2"}},
      {{"id", "ref3"}, {"role", "reference"}, {"endpoint", "mock:ref3"}},
      {{"id", "target"}, {"role", "target"}, {"endpoint", "mock:target"}},
  });
  f.config = json{{"output_dir", "out"},
                  {"concurrency", 8},
                  {"seed", 7},
                  {"retry", {{"attempts", 2}, {"base_delay_ms", 1}}},
                  {"mock_scripts",
                   {{"judge", judge_script()},
                    {"ref1", reference_script("weapon")},
                    {"ref2", reference_script("hack")},
                    {"ref3", reference_script("poison")},
                    {"target", target_script()}}},
                  {"models", models},
                  {"curation",
                   {{"corpus", "corpus.jsonl"},
                    {"categories", "categories.json"},
                    {"keywords", {"Taiwan", "Tiananmen", "Winnie", "Xi Jinping", "Dalai Lama", "Wuhan", "China"}},
                    {"judge", "judge"},
                    {"target", "target"},
                    {"reference_pool", {"ref1", "ref2", "ref3"}},
                    {"classifier", "heuristic"}}}};
  return f;
}

std::set<std::string> CurationFixture::survivor_ids() const {
  std::set<std::string> out;
  for (const auto& it : items) {
    if (it.fate.empty()) out.insert(it.id);
  }
  return out;
}

std::map<std::string, std::multiset<std::string>> CurationFixture::removed_by_stage() const {
  std::map<std::string, std::multiset<std::string>> out;
  for (const auto& s : stage_order) out[s];
  for (const auto& it : items) {
    if (!it.fate.empty()) out[it.fate].insert(it.id);
  }
  return out;
}

std::map<std::string, size_t> CurationFixture::removed_count_by_stage() const {
  std::map<std::string, size_t> out;
  for (const auto& [s, ids] : removed_by_stage()) out[s] = ids.size();
  return out;
}

std::map<std::string, std::set<std::string>> CurationFixture::review_by_stage() const {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& it : items) {
    if (it.review) out[it.fate].insert(it.id);
    if (it.fate.empty() && it.expected_category.empty()) out["categorize"].insert(it.id);
  }
  return out;
}

std::map<std::string, std::pair<size_t, size_t>> CurationFixture::counts_by_stage() const {
  auto removed = removed_count_by_stage();
  size_t llm = 0;
  for (const auto& it : items) llm += it.source == "llm";
  size_t alive = items.size() - llm;
  std::map<std::string, std::pair<size_t, size_t>> out;
  for (const auto& s : stage_order) {
    if (s == "categorize") alive += llm;
    out[s] = {alive, alive - removed[s]};
    alive -= removed[s];
  }
  return out;
}

fs::path CurationFixture::write_to(const fs::path& dir) const {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "corpus.jsonl", std::ios::binary | std::ios::trunc);
    for (const auto& line : corpus) out << line.dump() << "\n";
  }
  write_file(dir / "categories.json", categories.dump(2) + "\n");
  write_file(dir / "config.json", config.dump(2) + "\n");
  return dir / "config.json";
}

}  // namespace censaudit::test
