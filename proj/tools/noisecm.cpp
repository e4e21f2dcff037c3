// Copyright 2026 The noisecm Authors.
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

// noisecm command-line driver: annotate, cluster, init-cm, train, eval,
// benchmark. Every run writes manifest.toml into --out-dir; passing it
// back through --config reproduces the run.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "noisecm.hpp"

namespace fs = std::filesystem;
using namespace noisecm;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::vector<std::string> types = default_entity_types();
  std::string scheme = "io";
};

struct CorpusFlags {
  std::size_t token_column = 0;
  std::size_t tag_column = 1;
};

TagScheme parse_scheme(const std::string& s) {
  if (s == "io") return TagScheme::kIO;
  if (s == "iob2") return TagScheme::kIOB2;
  throw ConfigError("unknown tag scheme '" + s + "'");
}

Corpus read_tagged(const std::string& path, const GlobalOptions& g, const CorpusFlags& f,
                   CorpusRole role) {
  return read_conll(path, {f.token_column, f.tag_column, parse_scheme(g.scheme), g.types, role});
}

Corpus read_untagged(const std::string& path, const CorpusFlags& f) {
  return read_conll(path, {f.token_column, std::nullopt, TagScheme::kIO, {}, CorpusRole::kUnlabeled});
}

// "TYPE:path"
std::vector<GazetteerSource> parse_gazetteers(const std::vector<std::string>& specs) {
  std::vector<GazetteerSource> out;
  for (const auto& s : specs) {
    const auto colon = s.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
      throw ConfigError("--gazetteer expects TYPE:path, got '" + s + "'");
    out.push_back({s.substr(colon + 1), s.substr(0, colon)});
  }
  return out;
}

fs::path out_path(const GlobalOptions& g, const std::string& explicit_path,
                  const std::string& default_name) {
  if (!explicit_path.empty()) return explicit_path;
  return fs::path(g.out_dir) / default_name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// Artifact check run after every subcommand: each file must exist and
// parse with its reader.
enum class Artifact { kConll, kClusters, kJson, kJsonLines, kText };

void verify(const GlobalOptions& g, const std::vector<std::pair<fs::path, Artifact>>& files) {
  for (const auto& [path, kind] : files) {
    if (!fs::exists(path)) throw IoError("missing output " + path.string());
    switch (kind) {
      case Artifact::kConll:
        read_conll(path.string(), {0, 1, TagScheme::kIOB2, g.types, CorpusRole::kTest});
        break;
      case Artifact::kClusters:
        read_clusters(path.string());
        break;
      case Artifact::kJson:
        read_json(path);
        break;
      case Artifact::kJsonLines: {
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line))
          if (!line.empty()) [[maybe_unused]] auto j = nlohmann::json::parse(line);
        break;
      }
      case Artifact::kText:
        break;
    }
  }
}

// ---------------------------------------------------------------------------

struct AnnotateOptions {
  std::string input;
  std::vector<std::string> gazetteers;
  bool casefold = false;
  std::string out;
  std::string gold;
  CorpusFlags corpus;
};

void run_annotate(const GlobalOptions& g, const AnnotateOptions& o) {
  const Gazetteer gaz = load_gazetteer(parse_gazetteers(o.gazetteers), o.casefold);
  const Corpus raw = read_untagged(o.input, o.corpus);
  const Corpus labeled = annotate(raw, gaz);
  const fs::path out = out_path(g, o.out, "annotated.conll");
  write_conll(out.string(), labeled);
  std::cerr << "annotated " << labeled.sentences.size() << " sentences with " << gaz.size()
            << " gazetteer entries (" << gaz.conflicts() << " conflicts, "
            << gaz.skipped_lines() << " empty lines skipped)\n";
  std::vector<std::pair<fs::path, Artifact>> files = {{out, Artifact::kConll}};
  if (!o.gold.empty()) {
    const Corpus gold = read_tagged(o.gold, g, o.corpus, CorpusRole::kTest);
    const EvalReport r = labeling_report(gold, labeled);
    const auto txt = fs::path(g.out_dir) / "labeling_report.txt";
    const auto js = fs::path(g.out_dir) / "labeling_report.json";
    write_text(txt, render_text(r));
    write_json(js, to_json(r));
    files.push_back({txt, Artifact::kText});
    files.push_back({js, Artifact::kJson});
  }
  verify(g, files);
}

// ---------------------------------------------------------------------------

struct ClusterOptions {
  std::string method;
  std::string vectors;
  std::vector<std::string> corpora;
  std::size_t k = 10;
  std::size_t pca = 50;
  bool normalize = false;
  std::size_t max_iter = 100;
  std::size_t vocab_cap = 0;
  std::size_t window = 0;
  std::string out;
  CorpusFlags corpus;
};

Corpus concat_untagged(const std::vector<std::string>& paths, const CorpusFlags& f) {
  Corpus all{{}, CorpusRole::kUnlabeled};
  for (const auto& p : paths) {
    Corpus c = read_untagged(p, f);
    for (auto& s : c.sentences) all.sentences.push_back(std::move(s));
  }
  return all;
}

void run_cluster(const GlobalOptions& g, const ClusterOptions& o) {
  WordClustering clusters;
  if (o.method == "kmeans") {
    if (o.vectors.empty()) throw ConfigError("cluster kmeans needs --vectors");
    std::vector<std::string> words;
    std::optional<std::unordered_set<std::string>> filter;
    if (!o.corpora.empty()) {
      const Corpus text = concat_untagged(o.corpora, o.corpus);
      words = corpus_vocabulary({&text});
      filter.emplace(words.begin(), words.end());
    }
    const EmbeddingTable emb = load_vectors(o.vectors, filter ? &*filter : nullptr);
    if (o.corpora.empty()) {
      words = emb.words();
      std::sort(words.begin(), words.end());
    }
    clusters = kmeans_words(words, emb, {o.k, o.pca, o.normalize, o.max_iter, g.seed});
  } else if (o.method == "brown") {
    if (o.corpora.empty()) throw ConfigError("cluster brown needs --corpus");
    const Corpus text = concat_untagged(o.corpora, o.corpus);
    clusters = brown_cluster(text, o.k,
                             o.vocab_cap ? o.vocab_cap : std::numeric_limits<std::size_t>::max(),
                             o.window);
  } else {
    throw ConfigError("unknown clustering method '" + o.method + "'");
  }
  const fs::path out = out_path(g, o.out, "clusters.tsv");
  write_clusters(out.string(), clusters);
  verify(g, {{out, Artifact::kClusters}});
}

// ---------------------------------------------------------------------------

struct NoiseFlags {
  std::optional<double> lambda;
  std::optional<double> fraction;
  double alpha = 1e-6;
  std::size_t min_pairs = 5;
  std::vector<std::string> gazetteers;
  bool casefold = false;
  std::string clean_noisy;
  std::string clusters;
};

// Label pairs come from, in order of preference: an explicit noisy view of
// the clean corpus, the gazetteers, or clean sentences repeated in the
// noisy corpus.
std::vector<LabeledPair> label_pairs(const GlobalOptions& g, const NoiseFlags& n,
                                     const CorpusFlags& f, const Corpus& clean,
                                     const Corpus* noisy) {
  if (!n.clean_noisy.empty())
    return zip_pairs(clean, read_tagged(n.clean_noisy, g, f, CorpusRole::kNoisy));
  if (!n.gazetteers.empty())
    return collect_pairs(clean, load_gazetteer(parse_gazetteers(n.gazetteers), n.casefold));
  if (noisy && !noisy->sentences.empty()) return match_pairs(clean, *noisy);
  throw ConfigError("confusion initialization needs --gazetteer, --clean-noisy or --noisy");
}

struct InitCmOptions {
  std::string clean;
  std::string noisy;
  std::string mode = "global";
  std::string out;
  NoiseFlags noise;
  CorpusFlags corpus;
};

void run_init_cm(const GlobalOptions& g, const InitCmOptions& o) {
  const TagSet tagset(g.types);
  const Corpus clean = read_tagged(o.clean, g, o.corpus, CorpusRole::kClean);
  std::optional<Corpus> noisy;
  if (!o.noisy.empty()) noisy = read_tagged(o.noisy, g, o.corpus, CorpusRole::kNoisy);
  const auto pairs = label_pairs(g, o.noise, o.corpus, clean, noisy ? &*noisy : nullptr);
  NoiseModelOptions opt;
  opt.mode = parse_noise_mode(o.mode);
  opt.lambda = o.noise.lambda;
  opt.fraction = o.noise.fraction;
  opt.alpha = o.noise.alpha;
  opt.min_pairs = o.noise.min_pairs;

  WordClustering clusters(0);
  std::optional<std::map<ClusterId, std::size_t>> sizes;
  if (is_cluster_mode(opt.mode)) {
    if (o.noise.clusters.empty()) throw ConfigError("mode " + o.mode + " needs --clusters");
    clusters = read_clusters(o.noise.clusters);
    std::vector<const Corpus*> corpora = {&clean};
    if (noisy) corpora.push_back(&*noisy);
    sizes = count_groups(corpora, clusters);
  }
  const ConfusionModel cm = build_model(pairs, clusters, opt, tagset, sizes);

  const fs::path out = out_path(g, o.out, "confusion.json");
  write_json(out, to_json(cm));
  std::string maps = render_heatmap(row_softmax(cm.global), tagset, "global");
  for (const auto& [id, logits] : cm.groups)
    maps += "\n" + render_heatmap(effective_matrix(cm, id), tagset,
                                  "cluster " + std::to_string(id));
  const fs::path heat = fs::path(g.out_dir) / "heatmaps.txt";
  write_text(heat, maps);
  verify(g, {{out, Artifact::kJson}, {heat, Artifact::kText}});
}

// ---------------------------------------------------------------------------

struct TrainOptions {
  std::string mode = "global-cm";
  std::string clean, noisy, dev, vectors;
  std::size_t num_clusters = 10;
  std::size_t pca = 50;
  std::size_t embedding_dim = 50;
  std::size_t window = 2;
  std::size_t hidden = 128;
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double lr = 2e-3;
  std::size_t patience = 5;
  std::size_t clean_ratio = 1;
  std::size_t noisy_ratio = 1;
  bool freeze_noise_layer = false;
  NoiseFlags noise;
  CorpusFlags corpus;
};

void run_train(const GlobalOptions& g, const TrainOptions& o) {
  const TagSet tagset(g.types);
  VariantDefaults defaults;
  defaults.num_clusters = o.num_clusters;
  ModelVariant v = parse_variant(o.mode, defaults);
  if (o.noise.lambda) {
    if (!v.noise.lambda) throw ConfigError("--lambda given for mode " + o.mode);
    v.noise.lambda = o.noise.lambda;
  }
  if (o.noise.fraction) {
    if (!v.noise.fraction) throw ConfigError("--fraction given for mode " + o.mode);
    v.noise.fraction = o.noise.fraction;
  }
  v.noise.alpha = o.noise.alpha;
  v.noise.min_pairs = o.noise.min_pairs;

  const Corpus clean = read_tagged(o.clean, g, o.corpus, CorpusRole::kClean);
  const Corpus dev = read_tagged(o.dev, g, o.corpus, CorpusRole::kTest);
  Corpus noisy{{}, CorpusRole::kNoisy};
  if (v.training != TrainingMode::kBase) {
    if (o.noisy.empty()) throw ConfigError("mode " + o.mode + " needs --noisy");
    noisy = read_tagged(o.noisy, g, o.corpus, CorpusRole::kNoisy);
  }

  std::unordered_set<std::string> vocab;
  for (const Corpus* c : std::initializer_list<const Corpus*>{&clean, &noisy, &dev})
    for (const auto& s : c->sentences) vocab.insert(s.tokens.begin(), s.tokens.end());
  std::vector<std::pair<fs::path, Artifact>> files;
  EmbeddingTable emb;
  if (!o.vectors.empty()) {
    emb = load_vectors(o.vectors, &vocab);
  } else {
    emb = random_embeddings({vocab.begin(), vocab.end()}, o.embedding_dim, g.seed);
    const auto path = fs::path(g.out_dir) / "vectors.txt";
    write_vectors(path.string(), emb);
    files.push_back({path, Artifact::kText});
  }

  WordClustering clusters(0);
  if (!o.noise.clusters.empty()) {
    clusters = read_clusters(o.noise.clusters);
  } else if (v.clusters == ClusterMethod::kKMeans) {
    clusters = kmeans_words(corpus_vocabulary({&clean, &noisy}), emb,
                            {o.num_clusters, o.pca, false, 100, g.seed});
  } else if (v.clusters == ClusterMethod::kBrown) {
    Corpus text = strip_tags(clean);
    for (const auto& s : noisy.sentences) text.sentences.push_back({s.tokens, std::nullopt});
    clusters = brown_cluster(text, o.num_clusters);
  } else if (v.clusters == ClusterMethod::kGiven) {
    throw ConfigError("mode " + o.mode + " needs --clusters");
  }
  if (v.clusters != ClusterMethod::kNone) {
    const auto path = fs::path(g.out_dir) / "clusters.tsv";
    write_clusters(path.string(), clusters);
    files.push_back({path, Artifact::kClusters});
  }

  std::optional<ConfusionModel> cm;
  if (v.training == TrainingMode::kNoiseLayer) {
    const auto pairs = label_pairs(g, o.noise, o.corpus, clean, &noisy);
    cm = build_model(pairs, clusters, v.noise, tagset, count_groups({&clean, &noisy}, clusters));
  }

  TrainConfig tc;
  tc.optimizer.learning_rate = o.lr;
  tc.batch_size = o.batch_size;
  tc.epochs = o.epochs;
  tc.seed = g.seed;
  tc.clean_ratio = o.clean_ratio;
  tc.noisy_ratio = o.noisy_ratio;
  tc.patience = o.patience;
  tc.hidden = o.hidden;
  tc.train_noise_layer = !o.freeze_noise_layer;
  const FeatureContext ctx{&emb, &clusters, tagset, o.window, OovPolicy::kZero};
  const TrainResult tr = train(clean, noisy, dev, cm, ctx, tc, v.training);

  const auto ckpt = fs::path(g.out_dir) / "checkpoint.json";
  write_json(ckpt, checkpoint_to_json(tr, tagset));
  const auto log = fs::path(g.out_dir) / "train_log.jsonl";
  std::ostringstream lines;
  for (const auto& e : tr.log) lines << to_json(e).dump() << "\n";
  write_text(log, lines.str());
  files.push_back({ckpt, Artifact::kJson});
  files.push_back({log, Artifact::kJsonLines});
  std::cerr << "best dev F1 " << format_percent(tr.best_dev_f1) << " at epoch " << tr.best_epoch
            << "\n";
  verify(g, files);
}

// ---------------------------------------------------------------------------

struct EvalOptions {
  std::string gold;
  std::string pred;
  std::string checkpoint;
  std::string vectors;
  std::string clusters;
  bool strict = false;
  CorpusFlags corpus;
};

void run_eval(const GlobalOptions& g, const EvalOptions& o) {
  GlobalOptions iob = g;
  iob.scheme = "iob2";  // IOB2 parsing also accepts IO files
  const Corpus gold = read_tagged(o.gold, iob, o.corpus, CorpusRole::kTest);
  std::vector<std::pair<fs::path, Artifact>> files;
  Corpus pred;
  if (!o.pred.empty()) {
    pred = read_tagged(o.pred, iob, o.corpus, CorpusRole::kTest);
  } else if (!o.checkpoint.empty()) {
    if (o.vectors.empty()) throw ConfigError("eval with --checkpoint needs --vectors");
    const Checkpoint ck = checkpoint_from_json(read_json(o.checkpoint));
    std::unordered_set<std::string> vocab;
    for (const auto& s : gold.sentences) vocab.insert(s.tokens.begin(), s.tokens.end());
    const EmbeddingTable emb = load_vectors(o.vectors, &vocab);
    WordClustering clusters(0);
    if (!o.clusters.empty()) clusters = read_clusters(o.clusters);
    const FeatureContext ctx{&emb, &clusters, ck.tagset, ck.result.model.window,
                             OovPolicy::kZero};
    pred = predict(ck.result.model, gold, ctx);
    const auto path = fs::path(g.out_dir) / "predictions.conll";
    write_conll(path.string(), pred);
    files.push_back({path, Artifact::kConll});
  } else {
    throw ConfigError("eval needs --pred or --checkpoint");
  }
  const EvalReport r = score(gold, pred, o.strict);
  const auto txt = fs::path(g.out_dir) / "eval.txt";
  const auto js = fs::path(g.out_dir) / "eval.json";
  write_text(txt, render_text(r));
  write_json(js, to_json(r));
  std::cout << render_text(r);
  files.push_back({txt, Artifact::kText});
  files.push_back({js, Artifact::kJson});
  verify(g, files);
}

// ---------------------------------------------------------------------------

struct BenchmarkOptions {
  std::string spec = "default";
  std::size_t seeds = 5;
  std::vector<std::string> variants = {"base", "base+noise", "global-cm", "kmeans-cm-freq-ip"};
  std::size_t num_clusters = 3;
  double lambda = 0.3;
  double fraction = 0.5;
  std::size_t window = 0;
  std::size_t hidden = 128;
  std::size_t epochs = 50;
  std::size_t noisy_ratio = 4;
  std::size_t patience = 5;
  double lr = 2e-3;
};

void run_benchmark(const GlobalOptions& g, const BenchmarkOptions& o) {
  SyntheticSpec spec = o.spec == "default" ? default_synthetic_spec()
                                           : synthetic_spec_from_json(read_json(o.spec));
  std::vector<ModelVariant> variants;
  for (const auto& name : o.variants)
    variants.push_back(parse_variant(name, {o.lambda, o.fraction, o.num_clusters}));
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < o.seeds; ++i) seeds.push_back(g.seed + i);
  ExperimentConfig cfg;
  cfg.window = o.window;
  cfg.train.hidden = o.hidden;
  cfg.train.epochs = o.epochs;
  cfg.train.noisy_ratio = o.noisy_ratio;
  cfg.train.patience = o.patience;
  cfg.train.optimizer.learning_rate = o.lr;
  const TrendReport report = run_matrix_experiment(spec, variants, seeds, cfg);
  const auto txt = fs::path(g.out_dir) / "trend.txt";
  const auto js = fs::path(g.out_dir) / "trend.json";
  write_text(txt, render_text(report));
  nlohmann::json j = to_json(report);
  j["spec"] = to_json(spec);
  write_json(js, j);
  std::cout << render_text(report);
  verify(g, {{txt, Artifact::kText}, {js, Artifact::kJson}});
}

// Resolved configuration of the global options and the selected
// subcommand. Keys of the other subcommands are dropped so that replaying
// the file does not activate them; unset values are left out.
std::string manifest(const CLI::App& app) {
  std::vector<std::string> inactive;
  for (const CLI::App* sub : app.get_subcommands({}))
    if (!sub->parsed()) inactive.push_back(sub->get_name() + ".");
  std::istringstream full(app.config_to_str(true, false));
  std::string out, line;
  while (std::getline(full, line)) {
    const bool drop = std::any_of(inactive.begin(), inactive.end(), [&](const std::string& p) {
      return line.compare(0, p.size(), p) == 0;
    });
    const bool unset = line.size() >= 3 && line.compare(line.size() - 3, 3, "=\"\"") == 0;
    if (!drop && !unset) out += line + "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy-label sequence tagging with cluster-dependent confusion matrices"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--types", g.types, "Entity type inventory")->capture_default_str();
  app.add_option("--scheme", g.scheme, "Tag scheme of input corpora (io|iob2)")
      ->check(CLI::IsMember({"io", "iob2"}))
      ->capture_default_str();

  auto corpus_flags = [](CLI::App* sub, CorpusFlags& f) {
    sub->add_option("--token-column", f.token_column, "Token column")->capture_default_str();
    sub->add_option("--tag-column", f.tag_column, "Tag column")->capture_default_str();
  };
  auto noise_flags = [](CLI::App* sub, NoiseFlags& n) {
    sub->add_option("--lambda", n.lambda, "Weight of the global matrix (-ip modes)")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--fraction", n.fraction, "Share of largest clusters kept (-freq modes)");
    sub->add_option("--alpha", n.alpha, "Additive smoothing of pair counts")->capture_default_str();
    sub->add_option("--min-pairs", n.min_pairs, "Pairs needed for a cluster's own matrix")
        ->capture_default_str();
    sub->add_option("--gazetteer", n.gazetteers, "TYPE:path gazetteer for label pairs");
    sub->add_flag("--casefold", n.casefold, "Case-insensitive gazetteer matching");
    sub->add_option("--clean-noisy", n.clean_noisy, "Noisily labeled copy of the clean corpus");
    sub->add_option("--clusters", n.clusters, "Cluster TSV (word<TAB>id)");
  };

  AnnotateOptions ann;
  auto* sub_ann = app.add_subcommand("annotate", "Label text with gazetteers")->configurable();
  sub_ann->add_option("--input", ann.input, "Corpus to label")->required();
  sub_ann->add_option("--gazetteer", ann.gazetteers, "TYPE:path")->required();
  sub_ann->add_flag("--casefold", ann.casefold, "Case-insensitive matching");
  sub_ann->add_option("--out", ann.out, "Output CoNLL file");
  sub_ann->add_option("--gold", ann.gold, "Gold corpus for a labeling report");
  corpus_flags(sub_ann, ann.corpus);

  ClusterOptions cl;
  auto* sub_cl = app.add_subcommand("cluster", "Cluster the vocabulary")->configurable();
  sub_cl->add_option("method", cl.method, "kmeans | brown")
      ->required()
      ->check(CLI::IsMember({"kmeans", "brown"}));
  sub_cl->add_option("--vectors", cl.vectors, "Word vectors (text format)");
  sub_cl->add_option("--corpus", cl.corpora, "Corpus files providing the vocabulary / bigrams");
  sub_cl->add_option("--k", cl.k, "Number of clusters")->capture_default_str();
  sub_cl->add_option("--pca", cl.pca, "PCA dimension before k-means")->capture_default_str();
  sub_cl->add_flag("--normalize", cl.normalize, "Unit-normalize vectors before PCA");
  sub_cl->add_option("--max-iter", cl.max_iter, "k-means iteration cap")->capture_default_str();
  sub_cl->add_option("--vocab-cap", cl.vocab_cap, "Brown: cluster only the N most frequent words");
  sub_cl->add_option("--window", cl.window, "Brown active window (0: k + 50)");
  sub_cl->add_option("--out", cl.out, "Output TSV");
  corpus_flags(sub_cl, cl.corpus);

  InitCmOptions icm;
  auto* sub_icm =
      app.add_subcommand("init-cm", "Initialize confusion matrices from label pairs")->configurable();
  sub_icm->add_option("--clean", icm.clean, "Clean corpus")->required();
  sub_icm->add_option("--noisy", icm.noisy, "Noisy corpus (cluster sizes for -freq)");
  sub_icm->add_option("--mode", icm.mode,
                      "global | global-identity | cluster | cluster-freq | cluster-ip | "
                      "cluster-freq-ip")
      ->capture_default_str();
  sub_icm->add_option("--out", icm.out, "Output JSON");
  noise_flags(sub_icm, icm.noise);
  corpus_flags(sub_icm, icm.corpus);

  TrainOptions tr;
  auto* sub_tr = app.add_subcommand("train", "Train a tagger")->configurable();
  sub_tr->add_option("--mode", tr.mode,
                     "base | base+noise | global-cm | global-id-cm | {brown,kmeans,given}-cm"
                     "[-freq|-ip|-freq-ip]")
      ->capture_default_str();
  sub_tr->add_option("--clean", tr.clean, "Clean corpus")->required();
  sub_tr->add_option("--noisy", tr.noisy, "Noisy corpus");
  sub_tr->add_option("--dev", tr.dev, "Dev corpus")->required();
  sub_tr->add_option("--vectors", tr.vectors,
                     "Word vectors (text format); random vectors are drawn when omitted");
  sub_tr->add_option("--embedding-dim", tr.embedding_dim, "Dimension of drawn random vectors")
      ->capture_default_str();
  sub_tr->add_option("--num-clusters", tr.num_clusters, "Clusters for brown/kmeans modes")
      ->capture_default_str();
  sub_tr->add_option("--pca", tr.pca, "PCA dimension for kmeans modes")->capture_default_str();
  sub_tr->add_option("--window", tr.window, "Context window w")->capture_default_str();
  sub_tr->add_option("--hidden", tr.hidden, "Hidden units")->capture_default_str();
  sub_tr->add_option("--epochs", tr.epochs, "Maximum epochs")->capture_default_str();
  sub_tr->add_option("--batch-size", tr.batch_size, "Mini-batch size")->capture_default_str();
  sub_tr->add_option("--lr", tr.lr, "NADAM learning rate")->capture_default_str();
  sub_tr->add_option("--patience", tr.patience, "Early-stopping patience")->capture_default_str();
  sub_tr->add_option("--clean-ratio", tr.clean_ratio, "Clean batches per round")
      ->capture_default_str();
  sub_tr->add_option("--noisy-ratio", tr.noisy_ratio, "Noisy batches per round")
      ->capture_default_str();
  sub_tr->add_flag("--freeze-noise-layer", tr.freeze_noise_layer,
                   "Keep confusion matrices at their initialization");
  noise_flags(sub_tr, tr.noise);
  corpus_flags(sub_tr, tr.corpus);

  EvalOptions ev;
  auto* sub_ev = app.add_subcommand("eval", "Entity-level P/R/F1")->configurable();
  sub_ev->add_option("--gold", ev.gold, "Gold corpus")->required();
  sub_ev->add_option("--pred", ev.pred, "Predicted corpus");
  sub_ev->add_option("--checkpoint", ev.checkpoint, "Checkpoint to tag --gold with");
  sub_ev->add_option("--vectors", ev.vectors, "Word vectors for --checkpoint");
  sub_ev->add_option("--clusters", ev.clusters, "Cluster TSV used at training time");
  sub_ev->add_flag("--strict", ev.strict, "Ignore I- tags that do not continue a span");
  corpus_flags(sub_ev, ev.corpus);

  BenchmarkOptions bm;
  auto* sub_bm =
      app.add_subcommand("benchmark", "Synthetic cluster-dependent noise experiment")->configurable();
  sub_bm->add_option("--spec", bm.spec, "'default' or a JSON spec file")->capture_default_str();
  sub_bm->add_option("--seeds", bm.seeds, "Number of seeds (>= 3)")->capture_default_str();
  sub_bm->add_option("--variants", bm.variants, "Model variants")->capture_default_str();
  sub_bm->add_option("--num-clusters", bm.num_clusters, "k-means / Brown clusters")
      ->capture_default_str();
  sub_bm->add_option("--lambda", bm.lambda, "Interpolation weight")->capture_default_str();
  sub_bm->add_option("--fraction", bm.fraction, "Largest-cluster share")->capture_default_str();
  sub_bm->add_option("--window", bm.window, "Context window w")->capture_default_str();
  sub_bm->add_option("--hidden", bm.hidden, "Hidden units")->capture_default_str();
  sub_bm->add_option("--epochs", bm.epochs, "Maximum epochs")->capture_default_str();
  sub_bm->add_option("--noisy-ratio", bm.noisy_ratio, "Noisy batches per clean batch")
      ->capture_default_str();
  sub_bm->add_option("--patience", bm.patience, "Early-stopping patience")->capture_default_str();
  sub_bm->add_option("--lr", bm.lr, "NADAM learning rate")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    fs::create_directories(g.out_dir);
    write_text(fs::path(g.out_dir) / "manifest.toml", manifest(app));
    if (*sub_ann) run_annotate(g, ann);
    if (*sub_cl) run_cluster(g, cl);
    if (*sub_icm) run_init_cm(g, icm);
    if (*sub_tr) run_train(g, tr);
    if (*sub_ev) run_eval(g, ev);
    if (*sub_bm) run_benchmark(g, bm);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
