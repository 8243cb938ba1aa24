// Copyright 2026 The Murmur Authors
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


#include "murmur/metrics/evaluate.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "murmur/common/errors.hpp"
#include "murmur/common/tensor_io.hpp"

namespace murmur::metrics {

namespace fs = std::filesystem;
using nlohmann::json;

EmbeddingSource proxy_embeddings() {
  return [](const corpus::UtteranceRecord&, const Matrix& mel) -> std::optional<RowVector> { return proxy_embedding(mel); };
}

EmbeddingSource embedding_files(fs::path dir) {
  return [dir = std::move(dir)](const corpus::UtteranceRecord& r, const Matrix&) -> std::optional<RowVector> {
    const auto path = dir / (r.id + ".emb");
    if (!fs::exists(path)) return std::nullopt;
    const Matrix m = read_matrix(path);
    if (m.rows() == 0) return std::nullopt;
    return RowVector(m.colwise().mean());
  };
}

std::map<std::string, std::string> read_hypotheses(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read hypotheses " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected id<TAB>text");
    }
    if (!out.emplace(line.substr(0, tab), line.substr(tab + 1)).second) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": duplicate id " + line.substr(0, tab));
    }
  }
  return out;
}

void MetricsReport::summarize() {
  sim = wer = cer = f0_corr = {};
  const auto add = [](MetricSummary& s, const std::optional<double>& v) {
    if (!v) return;
    s.mean += *v;
    ++s.count;
  };
  for (const auto& u : utterances) {
    add(sim, u.sim);
    add(u.unit() == Unit::kWord ? wer : cer, u.error_rate);
    add(f0_corr, u.f0_corr);
  }
  for (auto* s : {&sim, &wer, &cer, &f0_corr}) {
    if (s->count > 0) s->mean /= static_cast<double>(s->count);
  }
}

MetricsReport evaluate(const corpus::Manifest& converted, const corpus::Manifest& reference, const EvalOptions& options) {
  std::map<std::string, const corpus::UtteranceRecord*> refs;
  for (const auto& r : reference) refs.emplace(r.id, &r);
  const EmbeddingSource embed = options.embeddings ? options.embeddings : proxy_embeddings();

  MetricsReport report;
  report.sim_label = options.sim_label;
  std::set<std::string> matched;
  for (const auto& conv : converted) {
    const auto it = refs.find(conv.id);
    if (it == refs.end()) {
      report.exclusions.push_back({conv.id, "no reference record"});
      continue;
    }
    matched.insert(conv.id);
    const corpus::UtteranceRecord& ref = *it->second;
    UtteranceMetrics u;
    u.id = conv.id;
    u.language = ref.language;
    try {
      const auto cw = corpus::prepare_audio(dsp::load_wav(conv.audio_path), options.frontend);
      const auto rw = corpus::prepare_audio(dsp::load_wav(ref.audio_path), options.frontend);
      const Matrix cm = dsp::mel_spectrogram(cw, options.frontend.mel).values;
      const Matrix rm = dsp::mel_spectrogram(rw, options.frontend.mel).values;
      const auto ce = embed(conv, cm), re = embed(ref, rm);
      if (ce && re) {
        try {
          u.sim = cosine_sim(*ce, *re);
        } catch (const UndefinedMetricError&) {
        }
      }
      u.f0_corr = f0_corr(dsp::extract_f0(cw, options.f0), dsp::extract_f0(rw, options.f0));
    } catch (const Error& e) {
      report.exclusions.push_back({conv.id, std::string("audio: ") + e.what()});
      continue;
    }
    const auto hyp = options.hypotheses.find(conv.id);
    const std::string& text = hyp != options.hypotheses.end() ? hyp->second : conv.transcript;
    try {
      u.error_rate = error_rate(text, ref.transcript, u.unit());
    } catch (const UndefinedMetricError&) {
    }
    report.utterances.push_back(std::move(u));
  }
  for (const auto& r : reference) {
    if (!matched.count(r.id)) report.exclusions.push_back({r.id, "no converted record"});
  }
  report.summarize();
  return report;
}

namespace {

std::string cell(const MetricSummary& s, int precision) {
  if (s.count == 0) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f (n=%zu)", precision, s.mean, s.count);
  return buf;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string format_report(const MetricsReport& report) {
  std::ostringstream os;
  os << report.sim_label << "\tWER\tCER\tF0_CoRR\n";
  os << cell(report.sim, 3) << '\t' << cell(report.wer, 3) << '\t' << cell(report.cer, 3) << '\t'
     << cell(report.f0_corr, 3) << '\n';
  os << "utterances: " << report.utterances.size() << ", excluded: " << report.exclusions.size() << '\n';
  for (const auto& e : report.exclusions) os << "  excluded " << e.id << ": " << e.reason << '\n';
  return os.str();
}

void write_report_jsonl(std::ostream& out, const MetricsReport& report) {
  for (const auto& u : report.utterances) {
    json j = {{"type", "utterance"},
              {"id", u.id},
              {"language", std::string(corpus::language_name(u.language))},
              {"sim", opt(u.sim)},
              {"unit", std::string(unit_name(u.unit()))},
              {"error_rate", opt(u.error_rate)},
              {"f0_corr", opt(u.f0_corr)}};
    out << j.dump() << '\n';
  }
  for (const auto& e : report.exclusions) {
    out << json{{"type", "exclusion"}, {"id", e.id}, {"reason", e.reason}}.dump() << '\n';
  }
  const auto summary = [](const MetricSummary& s) { return json{{"mean", s.mean}, {"count", s.count}}; };
  out << json{{"type", "summary"},
              {"sim_label", report.sim_label},
              {"sim", summary(report.sim)},
              {"wer", summary(report.wer)},
              {"cer", summary(report.cer)},
              {"f0_corr", summary(report.f0_corr)}}
             .dump()
      << '\n';
}

MetricsReport read_report_jsonl(std::istream& in) {
  MetricsReport report;
  std::string line;
  int line_no = 0;
  bool summary = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "utterance") {
        UtteranceMetrics u;
        u.id = j.at("id").get<std::string>();
        u.language = corpus::parse_language(j.at("language").get<std::string>());
        u.sim = opt_from(j, "sim");
        u.error_rate = opt_from(j, "error_rate");
        u.f0_corr = opt_from(j, "f0_corr");
        report.utterances.push_back(std::move(u));
      } else if (type == "exclusion") {
        report.exclusions.push_back({j.at("id").get<std::string>(), j.at("reason").get<std::string>()});
      } else if (type == "summary") {
        report.sim_label = j.at("sim_label").get<std::string>();
        summary = true;
      } else {
        throw ParseError("unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError("report line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!summary) throw ParseError("report has no summary line");
  report.summarize();
  return report;
}

}  // namespace murmur::metrics
