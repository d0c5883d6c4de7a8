// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include <json.hpp>

#include "copygen/decode/predictor.hpp"
#include "copygen/error.hpp"

namespace copygen::decode {

using nlohmann::json;

std::string to_json(const EncodedSource& e) {
  json j = {{"vocab_size", e.source.vocab_size},
            {"base", e.source.base},
            {"extended", e.source.extended},
            {"surface", e.source.surface},
            {"oov", e.source.oov}};
  if (!e.states.empty()) j["states"] = {{"shape", e.states.shape()}, {"data", e.states.values()}};
  return j.dump();
}

EncodedSource encoded_from_json(const std::string& text) {
  try {
    const auto j = json::parse(text);
    EncodedSource e;
    e.source.vocab_size = j.at("vocab_size").get<std::size_t>();
    e.source.base = j.at("base").get<std::vector<TokenId>>();
    e.source.extended = j.at("extended").get<std::vector<TokenId>>();
    e.source.surface = j.at("surface").get<std::vector<std::string>>();
    e.source.oov = j.at("oov").get<std::vector<std::string>>();
    if (j.contains("states")) {
      e.states = Tensor(j["states"].at("shape").get<numerics::Shape>(), j["states"].at("data").get<std::vector<double>>());
    }
    if (e.source.base.size() != e.source.extended.size() || (!e.states.empty() && e.states.rows() != e.length())) {
      throw Error("format_error", "inconsistent encoded source");
    }
    return e;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    throw Error("format_error", ex.what());
  }
}

std::string to_json(const std::vector<Candidate>& candidates) {
  json arr = json::array();
  for (const auto& c : candidates) arr.push_back({{"index", c.index}, {"token", c.token}, {"probability", c.probability}});
  return arr.dump();
}

std::vector<Candidate> candidates_from_json(const std::string& text) {
  try {
    std::vector<Candidate> out;
    for (const auto& c : json::parse(text)) {
      out.push_back({c.at("index").get<TokenId>(), c.at("token").get<std::string>(), c.at("probability").get<double>()});
    }
    return out;
  } catch (const std::exception& ex) {
    throw Error("format_error", ex.what());
  }
}

}  // namespace copygen::decode
