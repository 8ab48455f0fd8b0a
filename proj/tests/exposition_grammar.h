// Copyright 2026 The Riskgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Independent checker for the plain-text metrics exposition format 0.0.4,
// shared by unit and acceptance tests.

#ifndef RISKGATE_TESTS_EXPOSITION_GRAMMAR_H_
#define RISKGATE_TESTS_EXPOSITION_GRAMMAR_H_

#include <cstdlib>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>

namespace riskgate::testing {

struct ExpositionParse {
  bool ok = true;
  std::string error;
  std::map<std::string, double> samples;  // unlabeled samples by name
  std::map<std::string, std::string> types;
  std::set<std::string> helped;
};

inline bool ParseFloatToken(const std::string& s, double& out) {
  if (s == "+Inf" || s == "Inf") {
    out = HUGE_VAL;
    return true;
  }
  if (s == "-Inf") {
    out = -HUGE_VAL;
    return true;
  }
  if (s == "NaN") {
    out = std::nan("");
    return true;
  }
  static const std::regex number(R"([+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)");
  if (!std::regex_match(s, number)) return false;
  out = std::strtod(s.c_str(), nullptr);
  return true;
}

inline ExpositionParse ParseExposition(const std::string& doc) {
  ExpositionParse p;
  auto fail = [&p](const std::string& why, int line) {
    p.ok = false;
    p.error = "line " + std::to_string(line) + ": " + why;
    return p;
  };
  if (!doc.empty() && doc.back() != '\n') return fail("missing final newline", 0);
  static const std::string name = R"([a-zA-Z_:][a-zA-Z0-9_:]*)";
  static const std::regex help("# HELP (" + name + R"() ((?:[^\\\n]|\\\\|\\n)*))");
  static const std::regex type("# TYPE (" + name +
                               ") (counter|gauge|histogram|summary|untyped)");
  static const std::regex label_name(R"([a-zA-Z_][a-zA-Z0-9_]*)");
  static const std::regex sample("(" + name +
                                 R"()(\{(?:[a-zA-Z_][a-zA-Z0-9_]*="(?:[^"\\\n]|\\[\\"n])*",?)*\})? (\S+)(?: (-?\d+))?)");
  std::istringstream in(doc);
  std::string line;
  int n = 0;
  std::set<std::string> sampled;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::smatch m;
    if (line.rfind("# HELP ", 0) == 0) {
      if (!std::regex_match(line, m, help)) return fail("bad HELP", n);
      if (!p.helped.insert(m[1]).second) return fail("duplicate HELP", n);
      continue;
    }
    if (line.rfind("# TYPE ", 0) == 0) {
      if (!std::regex_match(line, m, type)) return fail("bad TYPE", n);
      if (p.types.count(m[1])) return fail("duplicate TYPE", n);
      if (sampled.count(m[1])) return fail("TYPE after samples", n);
      p.types[m[1]] = m[2];
      continue;
    }
    if (line[0] == '#') continue;
    if (!std::regex_match(line, m, sample)) return fail("bad sample: " + line, n);
    double value = 0.0;
    if (!ParseFloatToken(m[3], value)) return fail("bad value: " + std::string(m[3]), n);
    sampled.insert(m[1]);
    if (!m[2].matched) {
      if (p.samples.count(m[1])) return fail("duplicate sample", n);
      p.samples[m[1]] = value;
    }
  }
  return p;
}

}  // namespace riskgate::testing

#endif  // RISKGATE_TESTS_EXPOSITION_GRAMMAR_H_
