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

// riskgate command-line entry point.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "riskgate/blocklist.h"
#include "riskgate/classifier.h"
#include "riskgate/compliance.h"
#include "riskgate/config.h"
#include "riskgate/dp_mechanisms.h"
#include "riskgate/entropy_fusion.h"
#include "riskgate/gateway.h"
#include "riskgate/http_server.h"
#include "riskgate/input_filter.h"
#include "riskgate/replay.h"
#include "riskgate/risk_matrix.h"
#include "riskgate/watermark.h"

namespace {

using nlohmann::ordered_json;
using namespace riskgate;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string ReadStdin() {
  return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
}

// --text wins, then --text-file, then stdin.
std::string InputText(const std::optional<std::string>& text,
                      const std::optional<std::string>& file) {
  if (text) return *text;
  if (file) return ReadFile(*file);
  return ReadStdin();
}

// Blocklist from --blocklist, else from the config's paths.blocklist.
std::shared_ptr<BlocklistStore> LoadBlocklist(const std::optional<std::string>& blocklist,
                                              const GatewayConfig& cfg) {
  std::string path = blocklist ? *blocklist : cfg.paths.blocklist.string();
  if (path.empty()) throw std::invalid_argument("no blocklist: pass --blocklist or --config");
  return std::make_shared<BlocklistStore>(BlocklistDb::LoadFile(path));
}

GatewayConfig ConfigOrDefault(const std::optional<std::string>& path) {
  return path ? LoadConfig(*path) : GatewayConfig{};
}

ordered_json EvidenceJson(const std::vector<filter::Evidence>& evidence) {
  ordered_json out = ordered_json::array();
  for (const filter::Evidence& e : evidence) {
    out.push_back({{"source", std::string(filter::ToString(e.source))}, {"detail", e.detail}});
  }
  return out;
}

ordered_json LabelsJson(const std::set<ReviewLabel>& labels) {
  ordered_json out = ordered_json::array();
  for (ReviewLabel l : labels) out.push_back(std::string(ToString(l)));
  return out;
}

void Print(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

int RunServe(const std::string& config_path, std::optional<int> port,
             std::optional<int> metrics_port) {
  const GatewayConfig cfg = LoadConfig(config_path);
  Gateway gateway(cfg, LoadResources(cfg), std::make_shared<SystemClock>());
  HttpOptions opts;
  opts.host = cfg.server_host;
  opts.api_port = port.value_or(cfg.server_port);
  opts.metrics_port = metrics_port.value_or(cfg.telemetry_port);
  opts.api_key = cfg.api_key;

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  HttpServer server(gateway, opts);
  server.Start();
  std::cerr << "riskgate: API on " << opts.host << ":" << server.api_port()
            << ", metrics on " << opts.host << ":" << server.metrics_port()
            << "/metrics\n";
  int sig = 0;
  sigwait(&signals, &sig);
  server.Stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"riskgate: risk scoring and layered defense gateway for text generation"};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP gateway");
  std::string serve_config;
  std::optional<int> serve_port, serve_metrics_port;
  serve->add_option("--config", serve_config, "Gateway config file")->required();
  serve->add_option("--port", serve_port, "API port (overrides server.port)");
  serve->add_option("--metrics-port", serve_metrics_port,
                    "Metrics port (overrides telemetry.port)");

  // assess
  auto* assess = app.add_subcommand("assess", "Score threat inputs on the risk matrix");
  risk::ThreatInputs threat;
  double theta = 0.0;
  std::optional<double> escapes;
  std::optional<std::string> assess_config;
  std::string scene_name;
  assess->add_option("--freq", threat.freq, "Normalized attack frequency in [0,1]");
  assess->add_option("--escapes", escapes, "Escape detections in window (sets --freq)");
  assess->add_option("--stealth", threat.stealth, "Attack stealth in [0,1]");
  assess->add_option("--leak", threat.data_leak, "Data leak impact D in [0,1]");
  assess->add_option("--bias", threat.model_bias, "Model bias impact M in [0,1]");
  assess->add_option("--availability", threat.availability_impact,
                     "Availability impact S in [0,1]");
  assess->add_option("--theta", theta, "Abnormal call rate in [0,1]");
  assess->add_option("--scene", scene_name, "generic, medical or financial");
  assess->add_option("--config", assess_config, "Config for tier bands and scene");

  // filter
  auto* filt = app.add_subcommand("filter", "Run the input filter on one text");
  std::optional<std::string> filter_text, filter_file, filter_config, filter_blocklist;
  filt->add_option("--text", filter_text, "Input text");
  filt->add_option("--text-file", filter_file, "Read input text from a file");
  filt->add_option("--config", filter_config, "Gateway config file");
  filt->add_option("--blocklist", filter_blocklist, "Blocklist file");

  // review
  auto* rev = app.add_subcommand("review", "Run output compliance review on one text");
  std::optional<std::string> review_text, review_file, review_config, review_blocklist;
  double review_risk = 0.0;
  std::optional<double> review_epsilon, review_tau;
  rev->add_option("--text", review_text, "Output text");
  rev->add_option("--text-file", review_file, "Read output text from a file");
  rev->add_option("--risk", review_risk, "Current risk score R in [0,1]");
  rev->add_option("--epsilon", review_epsilon, "Current privacy budget epsilon");
  rev->add_option("--tau", review_tau, "Override review.tau");
  rev->add_option("--config", review_config, "Gateway config file");
  rev->add_option("--blocklist", review_blocklist, "Blocklist file");

  // wm
  auto* wmc = app.add_subcommand("wm", "Watermark tools");
  wmc->require_subcommand(1);
  auto* wm_embed = wmc->add_subcommand("embed", "Embed a watermark");
  auto* wm_extract = wmc->add_subcommand("extract", "Strip and validate a watermark");
  auto* wm_trace = wmc->add_subcommand("trace", "Look up a fingerprint");
  std::optional<std::string> wm_text, wm_file, wm_key_id, wm_index;
  std::string wm_keys, wm_client, wm_route = "cli", wm_fp;
  bool wm_xor = false;
  wm_embed->add_option("--text", wm_text, "Text to watermark");
  wm_embed->add_option("--text-file", wm_file, "Read text from a file");
  wm_embed->add_option("--keys", wm_keys, "Key store file (key_id=hex32 lines)")->required();
  wm_embed->add_option("--key-id", wm_key_id, "Key to use (default: newest)");
  wm_embed->add_option("--index", wm_index, "Append a trace record to this JSONL index");
  wm_embed->add_option("--client", wm_client, "Client id for the trace record");
  wm_embed->add_option("--route", wm_route, "Route for the trace record");
  wm_embed->add_flag("--xor", wm_xor, "XOR fingerprint mode instead of concatenation");
  wm_extract->add_option("--text", wm_text, "Watermarked text");
  wm_extract->add_option("--text-file", wm_file, "Read text from a file");
  wm_trace->add_option("--fingerprint", wm_fp, "Hex fingerprint")->required();
  wm_trace->add_option("--index", wm_index, "Trace index JSONL")->required();

  // noise
  auto* noise = app.add_subcommand("noise", "Add mixed Gaussian + Laplace noise to a vector");
  double noise_eps = 0.5, noise_delta = 1e-5;
  std::optional<double> noise_sensitivity;
  std::uint64_t noise_seed = 0;
  std::string noise_input, noise_calibration = "unscaled";
  bool noise_no_laplace = false;
  noise->add_option("--epsilon", noise_eps, "Privacy budget epsilon")->required();
  noise->add_option("--delta", noise_delta, "Failure probability delta")->required();
  noise->add_option("--sensitivity", noise_sensitivity,
                    "Sensitivity (default: max - min of the input vector)");
  noise->add_option("--seed", noise_seed, "RNG seed")->required();
  noise->add_option("--input", noise_input, "Vector file, one real per line")->required();
  noise->add_option("--calibration", noise_calibration, "unscaled or canonical");
  noise->add_flag("--no-laplace", noise_no_laplace, "Gaussian stage only");

  // weights
  auto* weights = app.add_subcommand("weights", "Entropy weights from an indicator CSV");
  std::string weights_input;
  weights->add_option("--input", weights_input, "CSV with header row")->required();

  // replay
  auto* replay = app.add_subcommand("replay", "Replay a labeled corpus through the gateway");
  std::string replay_corpus, replay_config;
  std::optional<std::uint64_t> replay_seed;
  std::optional<std::string> replay_out;
  bool replay_timings = false;
  replay->add_option("--corpus", replay_corpus, "Corpus JSONL")->required();
  replay->add_option("--config", replay_config, "Gateway config file")->required();
  replay->add_option("--seed", replay_seed, "Seed (default: replay.seed)");
  replay->add_option("--output", replay_out, "Write the report here instead of stdout");
  replay->add_flag("--timings", replay_timings,
                   "Include latency percentiles (breaks byte-identical reruns)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return RunServe(serve_config, serve_port, serve_metrics_port);

    if (*assess) {
      const GatewayConfig cfg = ConfigOrDefault(assess_config);
      if (escapes) threat.freq = risk::NormalizedFrequency(*escapes);
      threat.Validate();
      const risk::Scene scene = scene_name.empty() ? cfg.scene : risk::ParseScene(scene_name);
      risk::RiskAssessment a =
          risk::RiskScore(risk::ThreatLevel(threat), risk::ImpactScope(threat));
      const risk::Classification c = risk::Classify(a.score, theta, cfg.tier_bands);
      ordered_json j;
      j["threat"] = a.threat;
      j["impact"] = a.impact;
      j["raw_score"] = a.raw_score;
      j["score"] = a.score;
      j["theta"] = theta;
      j["score_tier"] = std::string(risk::ToString(c.score_tier));
      j["rate_tier"] = std::string(risk::ToString(c.rate_tier));
      j["tier"] = std::string(risk::ToString(c.tier));
      j["action"] = std::string(risk::ToString(c.action));
      j["scene"] = std::string(risk::ToString(scene));
      j["scene_threshold"] =
          risk::SceneThresholdValue(cfg.scene_threshold, scene, a.score);
      Print(j);
      return 0;
    }

    if (*filt) {
      const GatewayConfig cfg = ConfigOrDefault(filter_config);
      auto store = LoadBlocklist(filter_blocklist, cfg);
      auto classifier = std::make_shared<StubClassifier>(store, cfg.classifier_threshold);
      filter::InputFilter f(store, classifier, hmm::DialogueHmm::DefaultDialogueModel(),
                            cfg.filter);
      auto session = f.NewSession();
      const std::string text = InputText(filter_text, filter_file);
      const auto out = f.Evaluate(text, session, SystemClock().Now());
      ordered_json j;
      j["decision"] = std::string(filter::ToString(out.verdict.decision));
      j["evidence"] = EvidenceJson(out.verdict.evidence);
      j["risk_contribution"] = out.verdict.risk_contribution;
      j["manual_review"] = out.verdict.manual_review;
      j["degraded"] = out.verdict.degraded;
      j["confidence"] = out.intent.confidence;
      j["malicious"] = out.intent.malicious;
      j["rule_score"] = out.rule_score;
      Print(j);
      return out.verdict.decision == filter::Decision::kAllow ? 0 : 3;
    }

    if (*rev) {
      GatewayConfig cfg = ConfigOrDefault(review_config);
      if (review_tau) cfg.review.tau = *review_tau;
      auto store = LoadBlocklist(review_blocklist, cfg);
      StubClassifier classifier(store, cfg.classifier_threshold);
      const std::string text = InputText(review_text, review_file);
      const auto v = compliance::Review(text, review_risk, *store->Snapshot(), &classifier,
                                        cfg.review, review_epsilon);
      ordered_json j;
      j["decision"] = std::string(compliance::ToString(v.decision));
      j["labels"] = LabelsJson(v.labels);
      j["blended_score"] = v.blended_score;
      j["alpha"] = v.alpha_used;
      j["rule_score"] = v.rule_score;
      j["classifier_score"] = v.classifier_score;
      j["tau"] = cfg.review.tau;
      if (review_epsilon) j["theta_dp"] = v.theta_dp;
      j["classifier_skipped"] = v.classifier_skipped;
      if (v.decision == compliance::ReviewDecision::kRedact) j["redacted"] = v.redacted;
      Print(j);
      return 0;
    }

    if (*wm_embed) {
      const wm::KeyStore keys = wm::KeyStore::LoadFile(wm_keys);
      const wm::WatermarkKey* key = wm_key_id ? keys.Find(*wm_key_id) : &keys.Active();
      if (key == nullptr) throw std::invalid_argument("unknown key id " + *wm_key_id);
      const std::string text = InputText(wm_text, wm_file);
      const auto mode = wm_xor ? wm::FingerprintMode::kXor : wm::FingerprintMode::kConcat;
      const wm::Embedded e = wm::Embed(text, *key, mode);
      if (wm_index) {
        wm::TraceIndex index{std::filesystem::path(*wm_index)};
        wm::WatermarkRecord r;
        r.fingerprint = e.fingerprint;
        r.key_id = key->key_id;
        r.request = {wm_client, ToSeconds(SystemClock().Now()), wm_route};
        r.text_length = text::DecodeUtf8(wm::Extract(e.text).clean).size();
        index.Insert(r);
      }
      ordered_json j;
      j["text"] = e.text;
      j["fingerprint"] = DigestHex(e.fingerprint);
      j["key_id"] = key->key_id;
      Print(j);
      return 0;
    }

    if (*wm_extract) {
      const wm::Extracted x = wm::Extract(InputText(wm_text, wm_file));
      ordered_json j;
      j["clean"] = x.clean;
      j["valid"] = x.valid;
      ordered_json pattern = ordered_json::array();
      for (const wm::ZwMark& m : x.pattern) pattern.push_back({m.position, m.symbol});
      j["pattern"] = pattern;
      j["expected"] = x.expected;
      j["matched"] = x.matched;
      j["match_ratio"] = x.match_ratio;
      std::cout << j.dump(2, ' ', false, ordered_json::error_handler_t::replace) << "\n";
      return x.valid ? 0 : 4;
    }

    if (*wm_trace) {
      const wm::TraceIndex index{std::filesystem::path(*wm_index)};
      const auto records = index.Trace(DigestFromHex(wm_fp));
      for (const wm::WatermarkRecord& r : records) std::cout << r.ToJson() << "\n";
      return records.empty() ? 5 : 0;
    }

    if (*noise) {
      const Eigen::VectorXd g = dp::ParseVector(ReadFile(noise_input));
      const double sensitivity = noise_sensitivity.value_or(dp::Sensitivity(g));
      const dp::Calibration calibration = dp::ParseCalibration(noise_calibration);
      const double sigma = dp::GaussianSigma(noise_eps, noise_delta, calibration,
                                             sensitivity > 0.0 ? sensitivity : 1.0);
      const double b =
          noise_no_laplace || !(sensitivity > 0.0) ? 0.0 : dp::LaplaceScale(sensitivity, noise_eps);
      std::cerr << "sigma=" << sigma << " b=" << b << " sensitivity=" << sensitivity << "\n";
      const Eigen::VectorXd out = dp::InjectMixed(g, sigma, b, noise_seed);
      char buf[40];
      for (Eigen::Index i = 0; i < out.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", out(i));
        std::cout << buf << "\n";
      }
      return 0;
    }

    if (*weights) {
      const fusion::IndicatorMatrix m = fusion::LoadIndicatorCsv(weights_input);
      const auto normalized = fusion::Normalize(m.rows);
      const auto w = fusion::ComputeWeights(m);
      ordered_json list = ordered_json::array();
      for (std::size_t j = 0; j < m.indicator_names.size(); ++j) {
        const auto idx = static_cast<Eigen::Index>(j);
        list.push_back({{"name", m.indicator_names[j]},
                        {"entropy", w.entropies(idx)},
                        {"weight", w.weights(idx)},
                        {"degenerate", static_cast<bool>(normalized.degenerate[j])}});
      }
      Print({{"samples", m.rows.rows()}, {"indicators", list}});
      return 0;
    }

    if (*replay) {
      const GatewayConfig cfg = LoadConfig(replay_config);
      const Corpus corpus = ParseCorpus(ReadFile(replay_corpus));
      for (const CorpusError& e : corpus.errors) {
        std::cerr << replay_corpus << ":" << e.line << ": " << e.message << "\n";
      }
      Replayer replayer(cfg, LoadResources(cfg), replay_seed.value_or(cfg.replay_seed));
      const std::string report =
          ReplayReportJson(replayer.Run(corpus), ReplayOptions{replay_timings});
      if (replay_out) {
        std::ofstream out(*replay_out, std::ios::binary);
        out << report;
        if (!out) throw std::runtime_error("cannot write " + *replay_out);
      } else {
        std::cout << report;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "riskgate: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
