#include "monotrace/model_io.hpp"

#include "monotrace/errors.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace monotrace {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'M', 'T', 'R', 'C'};

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw ModelError("model file truncated");
    return v;
}

json header_json(const Model& m) {
    json j;
    j["format"] = "monotrace-model";
    j["version"] = m.version;
    j["monotone"] = m.monotone;
    j["classifier"] = classifier_kind_name(m.kind);
    j["k_max"] = m.k_max;
    j["event_types"] = m.alphabet.names();
    j["vocab"] = m.vocab.tokens();
    j["tokenizer"] = {{"extra_word_chars", m.tokenizer.extra_word_chars},
                      {"extra_space_chars", m.tokenizer.extra_space_chars}};
    j["groups"] = {{"names", m.groups.names}, {"members", m.groups.members}};
    j["embedding"] = {{"embed_dim", m.embedding.embed_dim},
                      {"input_dim", m.embedding.input_dim}};
    if (const auto* deep = std::get_if<DeepParams>(&m.classifier)) {
        json layers = json::array();
        for (const auto& layer : deep->layers) {
            layers.push_back({{"out", layer.W.rows},
                              {"in", layer.W.cols},
                              {"activation", activation_name(layer.activation)}});
        }
        j["deep_layers"] = layers;
    } else if (const auto* mm = std::get_if<MinMaxParams>(&m.classifier)) {
        j["minmax"] = {{"blocks", mm->blocks}, {"neurons", mm->neurons}, {"dim", mm->dim}};
    } else {
        j["linear_dim"] = std::get<LinearParams>(m.classifier).w.size();
    }
    json tensors = json::array();
    for (const auto& t : m.tensors()) {
        tensors.push_back({{"name", t.name}, {"size", t.size}});
    }
    j["tensors"] = tensors;
    return j;
}

// Rebuilds an empty Model with the right shapes from the header.
Model model_from_header(const json& j) {
    if (!j.contains("format") || j["format"] != "monotrace-model") {
        throw ModelError("not a monotrace model file");
    }
    const std::string version = j.at("version").get<std::string>();
    if (version != kModelFormatVersion) {
        throw ModelError("unsupported model version: " + version + " (expected " +
                         kModelFormatVersion + ")");
    }
    Model m;
    m.version = version;
    m.monotone = j.at("monotone").get<bool>();
    m.kind = classifier_kind_from_name(j.at("classifier").get<std::string>());
    m.k_max = j.at("k_max").get<int>();
    m.alphabet = EventAlphabet(j.at("event_types").get<std::vector<std::string>>());
    m.vocab = Vocabulary(j.at("vocab").get<std::vector<std::string>>());
    m.tokenizer.extra_word_chars = j.at("tokenizer").at("extra_word_chars").get<std::string>();
    m.tokenizer.extra_space_chars = j.at("tokenizer").at("extra_space_chars").get<std::string>();
    m.groups.names = j.at("groups").at("names").get<std::vector<std::string>>();
    m.groups.members = j.at("groups").at("members").get<std::vector<std::vector<EventTypeId>>>();
    m.embedding = EmbeddingParams(j.at("embedding").at("embed_dim").get<int>(),
                                  j.at("embedding").at("input_dim").get<int>());
    switch (m.kind) {
    case ClassifierKind::linear: {
        LinearParams lin;
        lin.w.assign(j.at("linear_dim").get<std::size_t>(), 0.0);
        m.classifier = std::move(lin);
        break;
    }
    case ClassifierKind::deep: {
        DeepParams deep;
        for (const auto& lj : j.at("deep_layers")) {
            LayerParams layer;
            layer.W = Matrix(lj.at("out").get<int>(), lj.at("in").get<int>());
            layer.b.assign(static_cast<std::size_t>(lj.at("out").get<int>()), 0.0);
            layer.activation = activation_from_name(lj.at("activation").get<std::string>());
            deep.layers.push_back(std::move(layer));
        }
        m.classifier = std::move(deep);
        break;
    }
    case ClassifierKind::minmax: {
        const auto& mj = j.at("minmax");
        m.classifier = MinMaxParams(mj.at("blocks").get<int>(), mj.at("neurons").get<int>(),
                                    mj.at("dim").get<int>());
        break;
    }
    }
    m.feature_scale.assign(0, 0.0);
    // feature_scale length comes from the tensor manifest below.
    for (const auto& t : j.at("tensors")) {
        if (t.at("name") == "feature_scale") {
            m.feature_scale.assign(t.at("size").get<std::size_t>(), 0.0);
        }
    }
    return m;
}

} // namespace

void save_model(const Model& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelError("cannot write model file: " + path);
    out.write(kMagic, sizeof(kMagic));
    const std::string header = header_json(m).dump();
    write_u64(out, header.size());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (const auto& t : m.tensors()) {
        write_u64(out, t.size);
        out.write(reinterpret_cast<const char*>(t.data),
                  static_cast<std::streamsize>(t.size * sizeof(double)));
    }
    if (!out) throw ModelError("failed writing model file: " + path);
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open model file: " + path);
    char magic[4] = {};
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ModelError("not a monotrace model file: " + path);
    }
    const std::uint64_t header_len = read_u64(in);
    std::string header(header_len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw ModelError("model file truncated: " + path);
    json j;
    try {
        j = json::parse(header);
    } catch (const json::exception& e) {
        throw ModelError(std::string("corrupt model header: ") + e.what());
    }
    Model m = model_from_header(j);

    const auto manifest = j.at("tensors");
    auto refs = m.tensors();
    if (manifest.size() != refs.size()) {
        throw ModelError("model tensor manifest does not match architecture");
    }
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const std::string name = manifest[i].at("name").get<std::string>();
        const std::uint64_t size = manifest[i].at("size").get<std::uint64_t>();
        if (name != refs[i].name || size != refs[i].size) {
            throw ModelError("model tensor mismatch: expected " + refs[i].name + "[" +
                             std::to_string(refs[i].size) + "], found " + name + "[" +
                             std::to_string(size) + "]");
        }
        const std::uint64_t stored = read_u64(in);
        if (stored != size) throw ModelError("model tensor length mismatch for " + name);
        in.read(reinterpret_cast<char*>(refs[i].data),
                static_cast<std::streamsize>(size * sizeof(double)));
        if (!in) throw ModelError("model file truncated in tensor " + name);
    }
    return m;
}

} // namespace monotrace
