#include "srea/nn/checkpoint.hpp"

#include <algorithm>

namespace srea::nn {

namespace {

constexpr const char* kArchitectureRecord = "meta.architecture";

core::Record to_record(const NamedTensor& t) {
  return core::Record{t.name, t.tensor.shape(),
                      std::vector<float>(t.tensor.values().begin(), t.tensor.values().end())};
}

}  // namespace

std::vector<core::Record> model_records(const SreaModel& model) {
  const Architecture& a = model.architecture();
  std::vector<float> meta = {
      static_cast<float>(model.input_channels()), static_cast<float>(model.seq_len()),
      static_cast<float>(model.num_classes()),    static_cast<float>(a.kernel),
      static_cast<float>(a.stride),               static_cast<float>(a.padding),
      static_cast<float>(a.embedding_dim),        static_cast<float>(a.classifier_hidden),
      static_cast<float>(a.dropout)};
  for (std::size_t c : a.encoder_channels) meta.push_back(static_cast<float>(c));
  std::vector<core::Record> records;
  records.push_back({kArchitectureRecord, core::Shape{meta.size()}, meta});
  for (const auto& p : model.parameters()) records.push_back(to_record(p));
  for (const auto& b : model.buffers()) records.push_back(to_record(b));
  return records;
}

void save_checkpoint(const std::filesystem::path& path, const SreaModel& model,
                     const std::vector<core::Record>& extra) {
  auto records = model_records(model);
  records.insert(records.end(), extra.begin(), extra.end());
  core::write_record_file(path, records);
}

SreaModel model_from_records(const std::vector<core::Record>& records) {
  const auto& meta = core::find_record(records, kArchitectureRecord).values;
  if (meta.size() < 10) {
    throw core::FormatError("architecture record is too short");
  }
  auto as_size = [](float v) { return static_cast<std::size_t>(v); };
  Architecture arch;
  arch.kernel = as_size(meta[3]);
  arch.stride = as_size(meta[4]);
  arch.padding = as_size(meta[5]);
  arch.embedding_dim = as_size(meta[6]);
  arch.classifier_hidden = as_size(meta[7]);
  arch.dropout = static_cast<double>(meta[8]);
  arch.encoder_channels.clear();
  for (std::size_t i = 9; i < meta.size(); ++i) arch.encoder_channels.push_back(as_size(meta[i]));

  SreaModel model(as_size(meta[0]), as_size(meta[1]), as_size(meta[2]), arch, core::Rng(0));
  for (auto& p : model.parameters()) {
    const auto& r = core::find_record(records, p.name);
    if (r.shape != p.tensor.shape()) {
      throw core::FormatError("record '" + p.name + "' has shape " + core::shape_string(r.shape) +
                              ", model expects " + core::shape_string(p.tensor.shape()));
    }
    auto dst = p.tensor.mutable_values();
    std::copy(r.values.begin(), r.values.end(), dst.begin());
  }
  std::vector<NamedTensor> buffers = model.buffers();
  for (auto& b : buffers) {
    const auto& r = core::find_record(records, b.name);
    b.tensor = TensorF::from(r.shape, r.values);
  }
  model.load_buffers(buffers);
  return model;
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  auto records = core::read_record_file(path);
  SreaModel model = model_from_records(records);
  return LoadedCheckpoint{std::move(model), std::move(records)};
}

}  // namespace srea::nn
