#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "sentimix/error.hpp"
#include "sentimix/formats.hpp"
#include "support.hpp"

using namespace sentimix;

namespace {

// Unique scratch file removed at scope exit.
struct TempFile {
  std::filesystem::path path;

  explicit TempFile(const std::string& stem) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           (stem + "." + std::to_string(::getpid()) + "." + std::to_string(counter++));
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("read_file names the missing path") {
  try {
    read_file("/nonexistent/sentimix-probe.txt");
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("/nonexistent/sentimix-probe.txt") !=
          std::string::npos);
  }
}

TEST_CASE("write_file then read_file round-trips bytes") {
  TempFile f("sentimix-bytes");
  const std::string payload = std::string("line\n") + '\0' + "\tafter\r\n";
  write_file(f.str(), payload);
  CHECK(read_file(f.str()) == payload);
}

TEST_CASE("corpus files round-trip through disk") {
  const Corpus c = load_corpus(testsupport::fixture_path("tiny_train.txt"), Split::Train);
  TempFile f("sentimix-corpus");
  save_corpus(f.str(), c);
  const Corpus back = load_corpus(f.str(), Split::Train);
  REQUIRE(back.tweets.size() == c.tweets.size());
  CHECK(serialize_corpus(back) == serialize_corpus(c));
}

TEST_CASE("cleaned documents serialize one per line") {
  std::vector<CleanedDoc> docs = {
      {"12", Sentiment::Negative, {"accha", "movi"}},
      {"13", std::nullopt, {}},
      {"14", Sentiment::Positive, {"one"}},
  };
  const std::string text = serialize_cleaned(docs);
  CHECK(text == "12\tnegative\taccha movi\n13\t-\t\n14\tpositive\tone\n");
  CHECK(parse_cleaned(text) == docs);
  CHECK(parse_cleaned("").empty());
  CHECK_THROWS_AS(parse_cleaned("12\tnegative accha\n"), FormatError);
  CHECK_THROWS_AS(parse_cleaned("12\tmeh\taccha\n"), FormatError);
}

TEST_CASE("matrix serialization is bit-exact") {
  LabeledMatrix m;
  m.X = testsupport::matrix({{0.1, 0.0, 1.0 / 3.0}, {0.0, 0.0, 0.0}, {7e-300, 2.0, 0.0}});
  m.uids = {"a", "b", "c"};
  m.labels = {Sentiment::Neutral, std::nullopt, Sentiment::Positive};
  const std::string text = serialize_matrix(m);
  CHECK(text.rfind("#cols 3\n", 0) == 0);
  const LabeledMatrix back = parse_matrix(text);
  CHECK(back.uids == m.uids);
  CHECK(back.labels == m.labels);
  REQUIRE(back.X.n_cols == m.X.n_cols);
  REQUIRE(back.X.rows.size() == m.X.rows.size());
  for (size_t r = 0; r < m.X.rows.size(); ++r) {
    REQUIRE(back.X.rows[r].entries.size() == m.X.rows[r].entries.size());
    for (size_t i = 0; i < m.X.rows[r].entries.size(); ++i) {
      CHECK(back.X.rows[r].entries[i].col == m.X.rows[r].entries[i].col);
      CHECK(back.X.rows[r].entries[i].value == m.X.rows[r].entries[i].value);
    }
  }
  // A second pass over the parsed copy reproduces the same bytes.
  CHECK(serialize_matrix(back) == text);
}

TEST_CASE("matrix parsing validates structure") {
  CHECK_THROWS_AS(parse_matrix("1\ta\t0:1\n"), FormatError);
  CHECK_THROWS_AS(parse_matrix("#cols x\n"), FormatError);
  CHECK_THROWS_AS(parse_matrix("#cols 2\nu\t-\t1:1 0:1\n"), FormatError);
  CHECK_THROWS_AS(parse_matrix("#cols 2\nu\t-\t0:1 0:2\n"), FormatError);
  CHECK_THROWS_AS(parse_matrix("#cols 2\nu\t-\t2:1\n"), FormatError);
  CHECK_THROWS_AS(parse_matrix("#cols 2\nu\t-\t0:bad\n"), FormatError);
  CHECK_THROWS_AS(parse_matrix("#cols 2\nu\t-\tnocolon\n"), FormatError);
  CHECK_THROWS_AS(parse_matrix("#cols 2\nu negative 0:1\n"), FormatError);

  LabeledMatrix m;
  m.X = testsupport::matrix({{1.0}});
  m.uids = {"a", "b"};
  m.labels = {std::nullopt, std::nullopt};
  CHECK_THROWS_AS(serialize_matrix(m), ValueError);

  // Explicit zeros are dropped while parsing, keeping rows sparse.
  const LabeledMatrix z = parse_matrix("#cols 3\nu\t-\t0:0 2:5\n");
  REQUIRE(z.X.rows.size() == 1);
  REQUIRE(z.X.rows[0].entries.size() == 1);
  CHECK(z.X.rows[0].entries[0].col == 2);
  CHECK(z.X.rows[0].entries[0].value == 5.0);
}

TEST_CASE("word sets skip comments and trim line endings") {
  TempFile f("sentimix-words");
  write_file(f.str(), "# header\n\nalpha\r\n  beta\t\ngamma\n#tail\nalpha\n");
  const std::set<std::string> words = load_word_set(f.str());
  CHECK(words == std::set<std::string>{"alpha", "beta", "gamma"});

  TempFile out("sentimix-words-out");
  save_word_list(out.str(), words);
  CHECK(read_file(out.str()) == "alpha\nbeta\ngamma\n");
  CHECK(load_word_set(out.str()) == words);
}

TEST_CASE("normalization dictionaries round-trip through disk") {
  const NormalizationDictionary dict = norm_dict_from_rows(
      {{"accha", {"acha", "achaa"}}, {"good", {"gud", "gudd"}}});
  TempFile f("sentimix-dict");
  save_norm_dict(f.str(), dict);
  const NormalizationDictionary back = load_norm_dict(f.str());
  CHECK(back.lookup == dict.lookup);
}

TEST_CASE("json files round-trip and reject garbage") {
  TempFile f("sentimix-json");
  const nlohmann::json j = {{"kind", "tfidf"}, {"vals", {1.0, 2.5}}};
  save_json(f.str(), j);
  CHECK(load_json(f.str()) == j);
  write_file(f.str(), "{not json");
  CHECK_THROWS_AS(load_json(f.str()), FormatError);
}

TEST_CASE("data dir resolution prefers the environment") {
  // The build points the default at the repository data directory.
  CHECK(std::filesystem::exists(std::filesystem::path(default_data_dir()) /
                                "norm_curated.txt"));
}
