// Python bindings for the main toolkit operations. Samples cross the
// boundary as canonical sample-JSON strings, token sequences as lists of
// ints.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "commu/combiner.hpp"
#include "commu/generator.hpp"
#include "commu/metrics.hpp"
#include "commu/midi_io.hpp"
#include "commu/preprocess.hpp"
#include "commu/sample_json.hpp"
#include "commu/token_codec.hpp"
#include "commu/version.hpp"

namespace py = pybind11;
using namespace commu;

namespace {

Sample parse_sample(const std::string& sample_json) {
  return sample_from_json(nlohmann::json::parse(sample_json));
}

std::string dump_sample(const Sample& s) { return sample_to_json(s).dump(); }

std::vector<Sample> parse_samples(const std::vector<std::string>& jsons) {
  std::vector<Sample> out;
  out.reserve(jsons.size());
  for (const std::string& j : jsons) out.push_back(parse_sample(j));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "metadata-conditioned note-sequence toolkit";
  m.attr("__version__") = kToolkitVersion;
  m.attr("VOCAB_SIZE") = kVocabularySize;

  m.def("encode", [](const std::string& sample_json) {
    return encode(parse_sample(sample_json));
  },
        py::arg("sample_json"),
        "Encode a sample-JSON string into its token sequence.");

  m.def("decode", [](const TokenSequence& tokens) {
    return dump_sample(decode(tokens));
  },
        py::arg("tokens"), "Decode a token sequence into sample JSON.");

  m.def("validate", [](const std::string& sample_json) {
    return validate_sample(parse_sample(sample_json));
  },
        py::arg("sample_json"), "Invariant violations; empty means valid.");

  m.def("grammar_errors", &validate_grammar, py::arg("tokens"),
        "Token-grammar violations; empty means valid.");

  m.def("augment", [](const std::string& sample_json) {
    std::vector<std::string> out;
    for (const Sample& v : augment(parse_sample(sample_json))) {
      out.push_back(dump_sample(v));
    }
    return out;
  },
        py::arg("sample_json"), "The 60 bpm/key corpus variants.");

  m.def("controllability_pitch", [](const std::string& s) {
    return controllability_pitch(parse_sample(s));
  },
        py::arg("sample_json"));
  m.def("controllability_velocity", [](const std::string& s) {
    return controllability_velocity(parse_sample(s));
  },
        py::arg("sample_json"));
  m.def("controllability_harmony", [](const std::string& s) {
    return controllability_harmony(parse_sample(s));
  },
        py::arg("sample_json"));

  m.def("chroma_similarity", [](const std::string& a, const std::string& b) {
    return chroma_similarity(parse_sample(a), parse_sample(b));
  });
  m.def("groove_similarity", [](const std::string& a, const std::string& b) {
    return groove_similarity(parse_sample(a), parse_sample(b));
  });
  m.def("distance", [](const std::string& a, const std::string& b) {
    return distance(parse_sample(a), parse_sample(b));
  });
  m.def("diversity", [](const std::vector<std::string>& jsons) {
    const auto samples = parse_samples(jsons);
    return diversity(samples);
  },
        py::arg("sample_jsons"), "Mean pairwise distance, needs >= 2 samples.");

  m.def("note_density",
        [](const std::string& s) { return note_density(parse_sample(s)); });
  m.def("note_length",
        [](const std::string& s) { return note_length(parse_sample(s)); });

  py::class_<CountModel>(m, "CountModel")
      .def(py::init<int, double>(), py::arg("order") = 4,
           py::arg("alpha") = 0.1)
      .def_static(
          "train",
          [](const std::vector<TokenSequence>& corpus, int order,
             double alpha) { return train_count_model(corpus, order, alpha); },
          py::arg("corpus"), py::arg("order") = 4, py::arg("alpha") = 0.1)
      .def_property_readonly("order", &CountModel::order)
      .def_property_readonly("alpha", &CountModel::alpha)
      .def("nll",
           [](const CountModel& m_, const TokenSequence& tokens) {
             return nll(m_, tokens);
           },
           py::arg("tokens"),
           "Mean negative log-likelihood over the body tokens.")
      .def("save",
           [](const CountModel& m_, const std::string& path) { m_.save(path); },
           py::arg("path"))
      .def_static("load",
                  [](const std::string& path) { return CountModel::load(path); },
                  py::arg("path"));

  m.def(
      "generate",
      [](const CountModel& model, const std::string& meta_json,
         const std::string& chords_json, int top_k, double temperature,
         std::uint64_t seed, int max_tokens, int num_samples) {
        const nlohmann::json mj = nlohmann::json::parse(meta_json);
        const MetadataSet metadata =
            sample_from_json(mj.contains("metadata")
                                 ? mj
                                 : nlohmann::json{{"metadata", mj}})
                .metadata;
        const nlohmann::json cj = nlohmann::json::parse(chords_json);
        const Sample holder = sample_from_json(nlohmann::json{
            {"metadata", {{"num_measures", metadata.num_measures}}},
            {"chords", cj.contains("chords") ? cj["chords"] : cj}});

        SamplerConfig cfg;
        cfg.top_k = top_k;
        cfg.temperature = temperature;
        cfg.seed = seed;
        cfg.max_tokens = max_tokens;
        const std::vector<MetadataSet> metas = {metadata};
        const auto groups =
            batch_generate(model, metas, holder.chords, cfg, num_samples);
        std::vector<TokenSequence> out;
        for (const GenerateResult& r : groups[0]) {
          if (!r.ok) throw std::runtime_error("generation failed: " + r.error);
          out.push_back(r.tokens);
        }
        return out;
      },
      py::arg("model"), py::arg("meta_json"), py::arg("chords_json"),
      py::arg("top_k") = 32, py::arg("temperature") = 0.95,
      py::arg("seed") = 0, py::arg("max_tokens") = 65536,
      py::arg("num_samples") = 1,
      "Chord-conditioned sampling; returns one token list per sample.");

  m.def(
      "combine",
      [](const std::vector<std::string>& sample_jsons, int division,
         bool force) {
        const auto samples = parse_samples(sample_jsons);
        const CombineResult r = combine(samples, division, force);
        return py::make_tuple(py::bytes(reinterpret_cast<const char*>(
                                            r.midi_bytes.data()),
                                        r.midi_bytes.size()),
                              r.manifest_json);
      },
      py::arg("sample_jsons"), py::arg("division") = kDefaultDivision,
      py::arg("force") = false,
      "Merge role-tagged samples; returns (midi_bytes, manifest_json).");

  m.def(
      "sample_to_midi",
      [](const std::string& sample_json, int division) {
        const Sample s = parse_sample(sample_json);
        const MidiTrackData track = sample_to_ticks(s, division);
        const auto bytes = write_midi(
            std::vector<MidiTrackData>{track},
            s.metadata.bpm.value_or(120),
            s.metadata.time_signature.value_or(TimeSignature::FourFour),
            division);
        return py::bytes(reinterpret_cast<const char*>(bytes.data()),
                         bytes.size());
      },
      py::arg("sample_json"), py::arg("division") = kDefaultDivision,
      "Render one sample as a single-track SMF.");

  m.def(
      "ingest_midi",
      [](const py::bytes& data, int gap_bars) {
        const std::string buf = data;
        const MidiFile file = read_midi(std::span<const std::uint8_t>(
            reinterpret_cast<const std::uint8_t*>(buf.data()), buf.size()));
        std::vector<std::string> out;
        for (const Sample& s : ingest_midi(file, gap_bars)) {
          out.push_back(dump_sample(s));
        }
        return out;
      },
      py::arg("midi_bytes"), py::arg("gap_bars") = kDefaultGapBars,
      "Slice/chunk/parse raw SMF bytes into sample JSONs.");
}
