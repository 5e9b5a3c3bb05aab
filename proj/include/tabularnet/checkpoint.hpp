#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

#include "tabularnet/encoder.hpp"

namespace tabularnet {

inline constexpr char kCheckpointMagic[8] = {'T', 'A', 'B', 'N', 'E', 'T', 'C', '1'};

/// Everything needed to rebuild the inference pipeline: feature schema
/// fingerprint, embedding provider shape, graph construction, task, and the
/// encoder layout. Parameter values follow as a raw little-endian blob.
struct CheckpointMeta {
  std::string schema_fingerprint;
  std::string embedding_kind = "hash";
  int embedding_dim = 64;
  GraphKind graph_kind = GraphKind::Wordnet;
  WordnetGraphOptions graph_opts;
  TaskKind task = TaskKind::Cell;
  EncoderConfig encoder;
};

namespace detail {

inline nlohmann::json encoder_to_json(const EncoderConfig& c) {
  return {{"input_dim", c.input_dim},   {"gru_hidden", c.gru_hidden},
          {"gru_layers", c.gru_layers}, {"fuse_dim", c.fuse_dim},
          {"pool_dim", c.pool_dim},     {"gin_hidden", c.gin_hidden},
          {"gin_layers", c.gin_layers}, {"head_hidden", c.head_hidden},
          {"stack_layers", c.stack_layers}, {"dropout", c.dropout},
          {"use_bigru", c.use_bigru},   {"use_gin", c.use_gin}};
}

inline EncoderConfig encoder_from_json(const nlohmann::json& j) {
  EncoderConfig c;
  c.input_dim = j.at("input_dim").get<int>();
  c.gru_hidden = j.at("gru_hidden").get<int>();
  c.gru_layers = j.at("gru_layers").get<int>();
  c.fuse_dim = j.at("fuse_dim").get<int>();
  c.pool_dim = j.at("pool_dim").get<int>();
  c.gin_hidden = j.at("gin_hidden").get<int>();
  c.gin_layers = j.at("gin_layers").get<int>();
  c.head_hidden = j.at("head_hidden").get<int>();
  c.stack_layers = j.at("stack_layers").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.use_bigru = j.at("use_bigru").get<bool>();
  c.use_gin = j.at("use_gin").get<bool>();
  return c;
}

}  // namespace detail

inline void save_checkpoint(const std::filesystem::path& path, const CheckpointMeta& meta,
                            const nn::ParamStore& params) {
  nlohmann::json header;
  header["format_version"] = 1;
  header["schema_fingerprint"] = meta.schema_fingerprint;
  header["embedding"] = {{"kind", meta.embedding_kind}, {"dim", meta.embedding_dim}};
  header["graph"] = {{"kind", graph_kind_name(meta.graph_kind)},
                     {"eta", meta.graph_opts.eta},
                     {"eps_depth", meta.graph_opts.eps_depth},
                     {"strict_gap", meta.graph_opts.strict_gap}};
  header["task"] = task_name(meta.task);
  header["encoder"] = detail::encoder_to_json(meta.encoder);
  nlohmann::json plist = nlohmann::json::array();
  for (const nn::Parameter& p : params.all())
    plist.push_back({{"name", p.name}, {"shape", p.var.val().shape()}});
  header["params"] = std::move(plist);

  const std::string hbytes = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write checkpoint: " + path.string());
  out.write(kCheckpointMagic, 8);
  const std::uint64_t hlen = hbytes.size();
  out.write(reinterpret_cast<const char*>(&hlen), 8);
  out.write(hbytes.data(), static_cast<std::streamsize>(hbytes.size()));
  std::uint64_t count = 0;
  for (const nn::Parameter& p : params.all()) count += static_cast<std::uint64_t>(p.var.val().numel());
  out.write(reinterpret_cast<const char*>(&count), 8);
  for (const nn::Parameter& p : params.all()) {
    const nn::Tensor& t = p.var.val();
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.numel() * sizeof(double)));
  }
  if (!out) throw ParseError("short write on checkpoint: " + path.string());
}

struct LoadedCheckpoint {
  CheckpointMeta meta;
  std::unique_ptr<TabularNetModel> model;
};

/// Rebuilds the model from the stored layout and restores every parameter.
/// The caller is responsible for comparing `meta.schema_fingerprint` with
/// the fingerprint of the features it is about to run.
inline LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint: " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw ParseError("not a checkpoint file (bad magic): " + path.string());
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), 8);
  std::string hbytes(hlen, '\0');
  in.read(hbytes.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw ParseError("truncated checkpoint header: " + path.string());

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hbytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("corrupt checkpoint header: " + std::string(e.what()));
  }

  LoadedCheckpoint lc;
  lc.meta.schema_fingerprint = header.at("schema_fingerprint").get<std::string>();
  lc.meta.embedding_kind = header.at("embedding").at("kind").get<std::string>();
  lc.meta.embedding_dim = header.at("embedding").at("dim").get<int>();
  const auto gk = graph_kind_from_name(header.at("graph").at("kind").get<std::string>());
  if (!gk) throw ParseError("checkpoint names unknown graph kind");
  lc.meta.graph_kind = *gk;
  lc.meta.graph_opts.eta = header.at("graph").at("eta").get<int>();
  lc.meta.graph_opts.eps_depth = header.at("graph").at("eps_depth").get<int>();
  lc.meta.graph_opts.strict_gap = header.at("graph").at("strict_gap").get<bool>();
  const auto task = task_from_name(header.at("task").get<std::string>());
  if (!task) throw ParseError("checkpoint names unknown task");
  lc.meta.task = *task;
  lc.meta.encoder = detail::encoder_from_json(header.at("encoder"));

  lc.model = std::make_unique<TabularNetModel>(lc.meta.encoder, lc.meta.task, /*seed=*/0);

  auto& params = lc.model->params().all();
  const auto& plist = header.at("params");
  if (plist.size() != params.size())
    throw ParseError("checkpoint parameter list does not match model layout");
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), 8);
  std::uint64_t expected = 0;
  for (size_t i = 0; i < params.size(); ++i) {
    if (plist[i].at("name").get<std::string>() != params[i].name ||
        plist[i].at("shape").get<std::vector<int>>() != params[i].var.val().shape())
      throw ParseError("checkpoint parameter '" + params[i].name + "' has unexpected layout");
    expected += static_cast<std::uint64_t>(params[i].var.val().numel());
  }
  if (count != expected) throw ParseError("checkpoint value count mismatch");
  for (nn::Parameter& p : params) {
    nn::Tensor& t = p.var.node->value;
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.numel() * sizeof(double)));
  }
  if (!in) throw ParseError("truncated checkpoint values: " + path.string());
  return lc;
}

}  // namespace tabularnet
