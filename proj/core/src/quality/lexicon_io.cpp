// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>

#include <json.hpp>

#include "copygen/error.hpp"
#include "copygen/quality/filters.hpp"

namespace copygen::quality {

using nlohmann::json;

CategoryLexicon TermLexicon::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io_error", "cannot read " + path.string());
  try {
    const auto j = json::parse(in);
    CategoryLexicon lex;
    lex.terms = j.value("terms", std::vector<std::string>{});
    lex.forbidden_combinations = j.value("forbidden_combinations", std::vector<std::vector<std::string>>{});
    lex.licensed_numbers = j.value("licensed_numbers", std::vector<std::string>{});
    return lex;
  } catch (const std::exception& e) {
    throw Error("lexicon_error", path.string() + ": " + e.what());
  }
}

void TermLexicon::save_file(const std::string& category, const std::filesystem::path& path) const {
  const auto* lex = find(category);
  if (!lex) throw Error("lexicon_error", "unknown category " + category);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("io_error", "cannot write " + path.string());
  out << json{{"terms", lex->terms},
              {"forbidden_combinations", lex->forbidden_combinations},
              {"licensed_numbers", lex->licensed_numbers}}
             .dump(2)
      << '\n';
}

TermLexicon TermLexicon::load_directory(const std::filesystem::path& dir) {
  TermLexicon out;
  if (!std::filesystem::is_directory(dir)) throw Error("io_error", "not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.add(f.stem().string(), load_file(f));
  return out;
}

}  // namespace copygen::quality
