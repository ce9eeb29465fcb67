// Copyright 2026 The aegen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Every subcommand reads its inputs, writes its
// declared outputs and exits 0; usage errors exit 2, data errors exit 1.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aegen/align.h"
#include "aegen/corpus.h"
#include "aegen/detector.h"
#include "aegen/eval.h"
#include "aegen/inject.h"
#include "aegen/lm.h"
#include "aegen/patterns.h"
#include "aegen/pipeline.h"
#include "aegen/smt.h"
#include "aegen/synthetic.h"

#ifndef AEGEN_VERSION
#define AEGEN_VERSION "0.0.0"
#endif

namespace aegen {
namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

// Sidecar-tagged annotated corpus.
struct AnnotatedInput {
  std::string m2;
  std::string orig_tags;
  std::string corr_tags;

  void Register(CLI::App *cmd, bool require_tags) {
    cmd->add_option("--m2", m2, "Annotated corpus in M2 format")->required()->check(CLI::ExistingFile);
    auto *o = cmd->add_option("--orig-tags", orig_tags, "Tagged TSV of the original sentences")
                  ->check(CLI::ExistingFile);
    auto *c = cmd->add_option("--corr-tags", corr_tags, "Tagged TSV of the corrected sentences")
                  ->check(CLI::ExistingFile);
    if (require_tags) {
      o->required();
      c->required();
    } else {
      o->needs(c);
      c->needs(o);
    }
  }

  std::vector<AnnotatedPair> Load() const {
    auto pairs = ParseM2(ReadFile(m2));
    if (!orig_tags.empty()) {
      AttachTags(pairs, ParseTagged(ReadFile(orig_tags)), ParseTagged(ReadFile(corr_tags)));
    }
    return pairs;
  }
};

std::vector<double> ParseWeights(const std::vector<double> &values) {
  if (values.size() != kNumFeatures) {
    throw Error("--weights needs " + std::to_string(kNumFeatures) +
                " values: lm p(t|s) p(s|t) levenshtein word-penalty phrase-penalty");
  }
  return values;
}

// "1..11" or "0,1,3".
std::vector<size_t> ParseRange(const std::string &text) {
  std::vector<size_t> out;
  auto dots = text.find("..");
  if (dots != std::string::npos) {
    long lo = ParseInt(std::string_view(text).substr(0, dots));
    long hi = ParseInt(std::string_view(text).substr(dots + 2));
    if (lo < 0 || hi < lo) throw Error("bad range '" + text + "'");
    for (long k = lo; k <= hi; ++k) out.push_back(static_cast<size_t>(k));
    return out;
  }
  for (auto field : Split(text, ',')) {
    long k = ParseInt(field);
    if (k < 0) throw Error("negative version count in '" + text + "'");
    out.push_back(static_cast<size_t>(k));
  }
  return out;
}

std::vector<LabeledSentence> LoadLabeled(const std::vector<std::string> &paths) {
  std::vector<LabeledSentence> out;
  for (const auto &path : paths) {
    auto part = ParseLabeled(ReadFile(path));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

void Flatten(const std::vector<std::vector<LabeledSentence>> &versions,
             std::vector<LabeledSentence> &out) {
  for (const auto &v : versions) out.insert(out.end(), v.begin(), v.end());
}

struct Options {
  int threads = 1;
  uint64_t seed = 0;
};

void AddDetectorOptions(CLI::App *cmd, DetectorConfig &c) {
  cmd->add_option("--embedding-dim", c.embedding_dim, "Word embedding size")->capture_default_str();
  cmd->add_option("--hidden-dim", c.hidden_dim, "LSTM size per direction")->capture_default_str();
  cmd->add_option("--ff-dim", c.ff_dim, "Feedforward layer size")->capture_default_str();
  cmd->add_option("--epochs", c.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--batch-size", c.batch_size, "Sentences per update")->capture_default_str();
  cmd->add_option("--rho", c.rho, "AdaDelta decay")->capture_default_str();
  cmd->add_option("--epsilon", c.epsilon, "AdaDelta epsilon")->capture_default_str();
  cmd->add_option("--min-count", c.min_count, "Rarer words map to <unk>")->capture_default_str();
  cmd->add_option("--threshold", c.threshold, "p(incorrect) needed to flag a token")
      ->capture_default_str();
}

void AddDecoderOptions(CLI::App *cmd, DecoderConfig &c, std::vector<double> &weights) {
  cmd->add_option("--beam", c.beam_width, "Hypotheses kept per stack")->capture_default_str();
  cmd->add_option("--weights", weights,
                  "Feature weights: lm p(t|s) p(s|t) levenshtein word-penalty phrase-penalty")
      ->expected(static_cast<int>(kNumFeatures));
}

int Run(int argc, char **argv) {
  CLI::App app{"Artificial error generation for learner-text error detection"};
  app.set_version_flag("--version", AEGEN_VERSION);
  app.set_config("--config", "", "Configuration file (INI/TOML, [subcommand] sections)");
  app.require_subcommand(1);
  Options global;
  app.add_option("--threads", global.threads, "Worker threads")->capture_default_str();
  app.add_option("--seed", global.seed, "Global random seed")->capture_default_str();

  std::function<void()> action;
  auto subcommand = [&](const std::string &name, const std::string &help) {
    CLI::App *cmd = app.add_subcommand(name, help);
    cmd->set_version_flag("--version", AEGEN_VERSION);
    cmd->fallthrough();
    return cmd;
  };

  // align
  AnnotatedInput align_in;
  std::string align_out;
  {
    auto *cmd = subcommand("align", "Token labels of the learner side of an annotated corpus");
    align_in.Register(cmd, false);
    cmd->add_option("--out", align_out, "Labeled TSV output")->required();
    cmd->callback([&] {
      action = [&] {
        auto pairs = align_in.Load();
        WriteFile(align_out, SerializeLabeled(GoldLabels(pairs)));
      };
    });
  }

  // extract-patterns
  AnnotatedInput ep_in;
  std::string ep_out, ep_background;
  size_t ep_threshold = 5;
  {
    auto *cmd = subcommand("extract-patterns", "Learn error patterns and background statistics");
    ep_in.Register(cmd, true);
    cmd->add_option("--threshold", ep_threshold, "Minimum pattern frequency")->capture_default_str();
    cmd->add_option("--out", ep_out, "Pattern store output")->required();
    cmd->add_option("--background-out", ep_background, "Also write the background statistics");
    cmd->callback([&] {
      action = [&] {
        auto pairs = ep_in.Load();
        auto store = PatternStore::Build(pairs, ep_threshold);
        auto background = ComputeBackground(pairs);
        WriteFile(ep_out, store.Serialize(&background));
        if (!ep_background.empty()) WriteFile(ep_background, SerializeBackground(background));
        std::cerr << store.size() << " patterns\n";
      };
    });
  }

  // inject
  std::string inj_patterns, inj_input, inj_out, inj_audit, inj_background;
  size_t inj_versions = 1;
  InjectionConfig inj_config;
  {
    auto *cmd = subcommand("inject", "Corrupt clean tagged text with learned patterns");
    cmd->add_option("--patterns", inj_patterns, "Pattern store")->required()->check(CLI::ExistingFile);
    cmd->add_option("--input", inj_input, "Clean tagged TSV")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", inj_out, "Labeled TSV output")->required();
    cmd->add_option("--background", inj_background,
                    "Background statistics (default: the ones stored with the patterns)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--versions", inj_versions, "Corrupted copies, written one after another")
        ->capture_default_str();
    cmd->add_option("--audit", inj_audit, "Audit log of applied patterns");
    cmd->add_option("--max-attempts", inj_config.max_attempts, "Sampling rounds per sentence")
        ->capture_default_str();
    cmd->callback([&] {
      action = [&] {
        std::optional<ErrorCountDistribution> stored;
        auto store = PatternStore::Parse(ReadFile(inj_patterns), &stored);
        if (!inj_background.empty()) {
          inj_config.background = ParseBackground(ReadFile(inj_background));
        } else if (stored) {
          inj_config.background = *stored;
        } else {
          throw Error("pattern store has no background statistics; pass --background");
        }
        inj_config.seed = global.seed;
        inj_config.threads = global.threads;
        auto corpus = ParseTagged(ReadFile(inj_input));
        auto versions = GenerateVersions(corpus, store, inj_config, inj_versions);
        std::vector<LabeledSentence> out;
        std::string audit;
        for (const auto &records : versions) {
          auto results = Results(records);
          out.insert(out.end(), results.begin(), results.end());
          audit += SerializeAuditLog(records, store);
        }
        WriteFile(inj_out, SerializeLabeled(out));
        if (!inj_audit.empty()) WriteFile(inj_audit, audit);
      };
    });
  }

  // train-lm
  AnnotatedInput lm_in;
  std::string lm_text, lm_out;
  int lm_order = 5;
  {
    auto *cmd = subcommand("train-lm", "Modified Kneser-Ney LM over learner sentences");
    auto *m2 = cmd->add_option("--m2", lm_in.m2, "Annotated corpus; its original side is used")
                   ->check(CLI::ExistingFile);
    auto *text = cmd->add_option("--text", lm_text, "Tagged TSV to train on instead")
                     ->check(CLI::ExistingFile);
    m2->excludes(text);
    cmd->add_option("--order", lm_order, "N-gram order")->capture_default_str();
    cmd->add_option("--out", lm_out, "ARPA output")->required();
    cmd->callback([&] {
      action = [&] {
        std::vector<TaggedSentence> sentences;
        if (!lm_text.empty()) {
          sentences = ParseTagged(ReadFile(lm_text));
        } else if (!lm_in.m2.empty()) {
          for (auto &pair : lm_in.Load()) sentences.push_back(std::move(pair.original));
        } else {
          throw CLI::RequiredError("--m2 or --text");
        }
        auto lm = NGramLM::Train(sentences, lm_order);
        for (const auto &w : lm.warnings()) std::cerr << "warning: " << w << "\n";
        WriteFile(lm_out, lm.ToArpa());
      };
    });
  }

  // build-phrase-table
  AnnotatedInput pt_in;
  std::string pt_out;
  size_t pt_max_len = 7, pt_prune = 0;
  double pt_identity = 1.0;
  {
    auto *cmd = subcommand("build-phrase-table", "Extract a corrected-to-learner phrase table");
    pt_in.Register(cmd, false);
    cmd->add_option("--max-length", pt_max_len, "Maximum phrase length")->capture_default_str();
    cmd->add_option("--identity-count", pt_identity, "Count given to missing identity pairs")
        ->capture_default_str();
    cmd->add_option("--prune", pt_prune, "Keep this many targets per source (0 = all)");
    cmd->add_option("--out", pt_out, "Phrase table output")->required();
    cmd->callback([&] {
      action = [&] {
        auto pairs = pt_in.Load();
        auto table = PhraseTable::Extract(ParallelFromPairs(pairs), pt_max_len, pt_identity);
        if (pt_prune > 0) table.Prune(pt_prune);
        WriteFile(pt_out, table.Serialize());
        std::cerr << table.size() << " phrase pairs\n";
      };
    });
  }

  // translate
  std::string tr_table, tr_lm, tr_input, tr_out, tr_nbest_out;
  size_t tr_versions = 1;
  DecoderConfig tr_config;
  std::vector<double> tr_weights;
  {
    auto *cmd = subcommand("translate", "Generate errors by decoding clean text");
    cmd->add_option("--table", tr_table, "Phrase table")->required()->check(CLI::ExistingFile);
    cmd->add_option("--lm", tr_lm, "ARPA language model")->required()->check(CLI::ExistingFile);
    cmd->add_option("--input", tr_input, "Clean tagged TSV")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", tr_out, "Labeled TSV output (versions one after another)")->required();
    cmd->add_option("--versions", tr_versions, "Versions from n-best ranks 1..k")->capture_default_str();
    cmd->add_option("--nbest", tr_config.nbest, "n-best list size")->capture_default_str();
    cmd->add_option("--nbest-out", tr_nbest_out, "Write the n-best lists");
    AddDecoderOptions(cmd, tr_config, tr_weights);
    cmd->callback([&] {
      action = [&] {
        if (!tr_weights.empty()) {
          auto w = ParseWeights(tr_weights);
          std::copy(w.begin(), w.end(), tr_config.weights.begin());
        }
        tr_config.threads = global.threads;
        tr_config.nbest = std::max(tr_config.nbest, tr_versions);
        auto table = PhraseTable::Parse(ReadFile(tr_table));
        auto lm = NGramLM::FromArpa(ReadFile(tr_lm));
        auto corpus = ParseTagged(ReadFile(tr_input));
        auto nbest = DecodeCorpus(corpus, table, lm, tr_config);
        std::vector<LabeledSentence> out;
        Flatten(ArtificialFromNBest(corpus, nbest, tr_versions), out);
        WriteFile(tr_out, SerializeLabeled(out));
        if (!tr_nbest_out.empty()) WriteFile(tr_nbest_out, SerializeNBest(corpus, nbest));
      };
    });
  }

  // train-detector
  std::vector<std::string> td_train;
  std::string td_dev, td_out;
  DetectorConfig td_config;
  {
    auto *cmd = subcommand("train-detector", "Train the BiLSTM error detector");
    cmd->add_option("--train", td_train, "Labeled TSV (repeatable; files are concatenated)")
        ->required()->check(CLI::ExistingFile);
    cmd->add_option("--dev", td_dev, "Labeled TSV for model selection")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", td_out, "Model output")->required();
    AddDetectorOptions(cmd, td_config);
    cmd->callback([&] {
      action = [&] {
        td_config.seed = global.seed;
        td_config.threads = global.threads;
        auto train = LoadLabeled(td_train);
        auto dev = ParseLabeled(ReadFile(td_dev));
        auto result = TrainDetector(train, dev, td_config, [](int epoch, double loss, double f) {
          std::fprintf(stderr, "epoch %3d  loss %.6f  dev F0.5 %6.2f\n", epoch, loss, 100 * f);
        });
        std::fprintf(stderr, "best epoch %d\n", result.best_epoch);
        WriteFile(td_out, result.model.Serialize());
      };
    });
  }

  // detect
  std::string dt_model, dt_input, dt_out;
  double dt_threshold = 0.5;
  {
    auto *cmd = subcommand("detect", "Label tokens with a trained detector");
    cmd->add_option("--model", dt_model, "Detector model")->required()->check(CLI::ExistingFile);
    cmd->add_option("--input", dt_input, "Tagged or labeled TSV")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", dt_out, "Labeled TSV output")->required();
    cmd->add_option("--threshold", dt_threshold, "p(incorrect) needed to flag a token")
        ->capture_default_str();
    cmd->callback([&] {
      action = [&] {
        auto model = DetectorModel::Parse(ReadFile(dt_model));
        auto input = ParseLabeled(ReadFile(dt_input));
        WriteFile(dt_out, SerializeLabeled(Predict(model, input, dt_threshold, global.threads)));
      };
    });
  }

  // evaluate
  std::string ev_pred, ev_gold;
  bool ev_json = false;
  {
    auto *cmd = subcommand("evaluate", "Token-level precision, recall and F0.5");
    cmd->add_option("--pred", ev_pred, "Predicted labels")->required()->check(CLI::ExistingFile);
    cmd->add_option("--gold", ev_gold, "Gold labels")->required()->check(CLI::ExistingFile);
    cmd->add_flag("--json", ev_json, "Print JSON instead of text");
    cmd->callback([&] {
      action = [&] {
        auto scores = Score(ParseLabeled(ReadFile(ev_pred)), ParseLabeled(ReadFile(ev_gold)));
        std::cout << (ev_json ? ScoresToJson(scores).dump() + "\n" : FormatScores(scores));
      };
    });
  }

  // significance
  std::string sg_a, sg_b, sg_gold;
  size_t sg_rounds = 10000;
  bool sg_json = false;
  {
    auto *cmd = subcommand("significance", "Approximate randomisation test between two systems");
    cmd->add_option("--a", sg_a, "Labels of system A")->required()->check(CLI::ExistingFile);
    cmd->add_option("--b", sg_b, "Labels of system B")->required()->check(CLI::ExistingFile);
    cmd->add_option("--gold", sg_gold, "Gold labels")->required()->check(CLI::ExistingFile);
    cmd->add_option("--rounds", sg_rounds, "Shuffling rounds")->capture_default_str();
    cmd->add_flag("--json", sg_json, "Print JSON instead of text");
    cmd->callback([&] {
      action = [&] {
        auto r = RandomizationTest(ParseLabeled(ReadFile(sg_a)), ParseLabeled(ReadFile(sg_b)),
                                   ParseLabeled(ReadFile(sg_gold)), sg_rounds, global.seed,
                                   global.threads);
        if (sg_json) {
          std::cout << SignificanceToJson(r).dump() << "\n";
        } else {
          std::printf("observed  %.6f\nrounds    %zu\nseed      %llu\np-value   %.6f\n",
                      r.observed, r.rounds, static_cast<unsigned long long>(r.seed), r.p_value);
        }
      };
    });
  }

  // experiment-versions
  std::string ev2_train, ev2_dev, ev2_clean, ev2_generator, ev2_k = "0..3";
  std::string ev2_patterns, ev2_table, ev2_lm;
  DetectorConfig ev2_detector;
  DecoderConfig ev2_decoder;
  std::vector<double> ev2_weights;
  {
    auto *cmd = subcommand("experiment-versions",
                           "Dev F0.5 as generated versions are added to the training data");
    cmd->add_option("--train", ev2_train, "Labeled TSV of the annotated training data")
        ->required()->check(CLI::ExistingFile);
    cmd->add_option("--dev", ev2_dev, "Labeled TSV for evaluation")->required()->check(CLI::ExistingFile);
    cmd->add_option("--clean", ev2_clean, "Clean tagged TSV to corrupt")->required()->check(CLI::ExistingFile);
    cmd->add_option("--generator", ev2_generator, "pat or mt")
        ->required()->check(CLI::IsMember({"pat", "mt"}));
    cmd->add_option("--k", ev2_k, "Version counts, e.g. 1..11 or 0,1,3")->capture_default_str();
    cmd->add_option("--patterns", ev2_patterns, "Pattern store (pat)")->check(CLI::ExistingFile);
    cmd->add_option("--table", ev2_table, "Phrase table (mt)")->check(CLI::ExistingFile);
    cmd->add_option("--lm", ev2_lm, "ARPA language model (mt)")->check(CLI::ExistingFile);
    AddDetectorOptions(cmd, ev2_detector);
    AddDecoderOptions(cmd, ev2_decoder, ev2_weights);
    cmd->callback([&] {
      action = [&] {
        auto ks = ParseRange(ev2_k);
        size_t max_k = 0;
        for (size_t k : ks) max_k = std::max(max_k, k);
        auto base = ParseLabeled(ReadFile(ev2_train));
        auto dev = ParseLabeled(ReadFile(ev2_dev));
        auto clean = ParseTagged(ReadFile(ev2_clean));
        std::vector<std::vector<LabeledSentence>> versions;
        if (max_k > 0 && ev2_generator == "pat") {
          if (ev2_patterns.empty()) throw CLI::RequiredError("--patterns");
          std::optional<ErrorCountDistribution> stored;
          auto store = PatternStore::Parse(ReadFile(ev2_patterns), &stored);
          if (!stored) throw Error("pattern store has no background statistics");
          InjectionConfig config;
          config.background = *stored;
          config.seed = global.seed;
          config.threads = global.threads;
          for (const auto &records : GenerateVersions(clean, store, config, max_k)) {
            versions.push_back(Results(records));
          }
        } else if (max_k > 0) {
          if (ev2_table.empty()) throw CLI::RequiredError("--table");
          if (ev2_lm.empty()) throw CLI::RequiredError("--lm");
          if (!ev2_weights.empty()) {
            auto w = ParseWeights(ev2_weights);
            std::copy(w.begin(), w.end(), ev2_decoder.weights.begin());
          }
          ev2_decoder.nbest = max_k;
          ev2_decoder.threads = global.threads;
          versions = GenerateArtificial(clean, PhraseTable::Parse(ReadFile(ev2_table)),
                                        NGramLM::FromArpa(ReadFile(ev2_lm)), ev2_decoder, max_k);
        }
        ev2_detector.seed = global.seed;
        ev2_detector.threads = global.threads;
        std::printf("versions\tdev_f0.5\n");
        for (size_t k : ks) {
          size_t one[] = {k};
          auto rows = ExperimentVersions(base, versions, one, dev, ev2_detector);
          std::printf("%zu\t%.2f\n", rows[0].versions, 100 * rows[0].dev_f05);
          std::fflush(stdout);
        }
      };
    });
  }

  // make-synthetic
  std::string ms_dir;
  SyntheticConfig ms_config;
  {
    auto *cmd = subcommand("make-synthetic", "Write a synthetic annotated world for experiments");
    cmd->add_option("--out-dir", ms_dir, "Output directory")->required();
    cmd->add_option("--train", ms_config.train, "Annotated training pairs")->capture_default_str();
    cmd->add_option("--dev", ms_config.dev, "Development pairs")->capture_default_str();
    cmd->add_option("--test", ms_config.test, "Test pairs")->capture_default_str();
    cmd->add_option("--clean", ms_config.clean, "Clean sentences")->capture_default_str();
    cmd->callback([&] {
      action = [&] {
        ms_config.seed = global.seed;
        auto world = BuildSyntheticWorld(ms_config);
        std::filesystem::create_directories(ms_dir);
        auto write_split = [&](const std::string &name, const std::vector<AnnotatedPair> &pairs) {
          std::vector<TaggedSentence> orig, corr;
          for (const auto &p : pairs) {
            orig.push_back(p.original);
            corr.push_back(p.corrected);
          }
          WriteFile(ms_dir + "/" + name + ".m2", SerializeM2(pairs));
          WriteFile(ms_dir + "/" + name + ".orig.tsv", SerializeTagged(orig));
          WriteFile(ms_dir + "/" + name + ".corr.tsv", SerializeTagged(corr));
          WriteFile(ms_dir + "/" + name + ".gold.tsv", SerializeLabeled(GoldLabels(pairs)));
        };
        write_split("train", world.train);
        write_split("dev", world.dev);
        write_split("test", world.test);
        WriteFile(ms_dir + "/clean.tsv", SerializeTagged(world.clean));
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  try {
    if (action) action();
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: missing or invalid option " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}

}  // namespace
}  // namespace aegen

int main(int argc, char **argv) { return aegen::Run(argc, argv); }
