#include "socnav/ddpg.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "socnav/seeding.hpp"

namespace socnav {

// ---------------------------------------------------------------------------
// ReplayBuffer

ReplayBuffer::ReplayBuffer(std::size_t capacity, const LidarConfig& lidar, const NetworkSpec& spec,
                           int max_scans_per_step)
    : capacity_(capacity), lidar_(lidar), spec_(spec), max_scans_per_step_(max_scans_per_step) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  if (max_scans_per_step < 1) throw std::invalid_argument("max scans per step must be positive");
  if (lidar.beams != spec.beams) throw std::invalid_argument("lidar and network beam counts differ");
  transitions_.resize(capacity);
  // Each live transition spans at most max_scans_per_step new scans plus one
  // episode-start scan, and its oldest row reaches `rows` scans further back.
  scan_capacity_ = capacity * static_cast<std::size_t>(max_scans_per_step + 1) +
                   static_cast<std::size_t>(spec.rows) + 1;
  scan_ranges_.resize(scan_capacity_ * static_cast<std::size_t>(lidar.beams));
  scan_headings_.resize(scan_capacity_);
}

void ReplayBuffer::push_scan(const Scan& scan) {
  if (static_cast<int>(scan.ranges.size()) != lidar_.beams) {
    throw std::invalid_argument("scan beam count does not match replay buffer");
  }
  const std::size_t s = static_cast<std::size_t>(scans_written_) % scan_capacity_;
  std::copy(scan.ranges.begin(), scan.ranges.end(),
            scan_ranges_.begin() + static_cast<std::ptrdiff_t>(s * lidar_.beams));
  scan_headings_[s] = scan.heading_at_capture;
  ++scans_written_;
}

void ReplayBuffer::begin_episode(const Scan& first, GoalVector goal, double goal_reference) {
  push_scan(first);
  current_.newest = scans_written_ - 1;
  current_.first = current_.newest;
  current_.goal = goal;
  current_.goal_reference = goal_reference;
  in_episode_ = true;
}

void ReplayBuffer::record(Action action, double reward, bool terminal,
                          std::span<const Scan> new_scans, GoalVector next_goal) {
  if (!in_episode_) throw std::logic_error("record() before begin_episode()");
  if (static_cast<int>(new_scans.size()) > max_scans_per_step_) {
    throw std::logic_error("more scans in one step than the buffer was sized for");
  }
  for (const Scan& s : new_scans) push_scan(s);
  ObsRef next = current_;
  next.newest = scans_written_ - 1;
  next.goal = next_goal;

  Transition t{current_, next, action, reward, terminal};
  if (count_ < capacity_) {
    transitions_[slot(count_)] = t;
    ++count_;
  } else {
    transitions_[head_] = t;
    head_ = (head_ + 1) % capacity_;
  }
  current_ = next;
}

void ReplayBuffer::fill_image(const ObsRef& ref, double* out) const {
  const int rows = spec_.rows;
  const int beams = lidar_.beams;
  const std::int64_t oldest = std::max(ref.first, ref.newest - (rows - 1));
  if (scans_written_ - oldest > static_cast<std::int64_t>(scan_capacity_)) {
    throw std::logic_error("replay transition refers to evicted scans");
  }
  const double heading =
      scan_headings_[static_cast<std::size_t>(ref.newest) % scan_capacity_];
  const double inv_scale = 1.0 / spec_.range_scale;
  const double fill = lidar_.range_max * inv_scale;
  for (int r = 0; r < rows; ++r) {
    const std::int64_t idx = std::max(ref.first, ref.newest - (rows - 1) + r);
    const std::size_t s = static_cast<std::size_t>(idx) % scan_capacity_;
    const int shift = calibration_shift(scan_headings_[s], heading, lidar_);
    const float* src = scan_ranges_.data() + s * static_cast<std::size_t>(beams);
    double* dst = out + static_cast<std::size_t>(r) * beams;
    for (int i = 0; i < beams; ++i) {
      const int j = i + shift;
      dst[i] = (j >= 0 && j < beams) ? static_cast<double>(src[j]) * inv_scale : fill;
    }
  }
}

Batch ReplayBuffer::gather(std::span<const std::size_t> indices) const {
  const auto n = static_cast<Eigen::Index>(indices.size());
  const Eigen::Index dim = static_cast<Eigen::Index>(spec_.rows) * spec_.beams;
  Batch b;
  b.images.resize(dim, n);
  b.next_images.resize(dim, n);
  b.goals.resize(2, n);
  b.next_goals.resize(2, n);
  b.actions.resize(2, n);
  b.rewards.resize(n);
  b.dones.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::size_t i = indices[static_cast<std::size_t>(k)];
    if (i >= count_) throw std::out_of_range("replay index out of range");
    const Transition& t = transitions_[slot(i)];
    fill_image(t.obs, b.images.col(k).data());
    fill_image(t.next, b.next_images.col(k).data());
    b.goals.col(k) = encode_goal(t.obs.goal, t.obs.goal_reference, spec_);
    b.next_goals.col(k) = encode_goal(t.next.goal, t.next.goal_reference, spec_);
    b.actions(0, k) = t.action.ax;
    b.actions(1, k) = t.action.ay;
    b.rewards(k) = t.reward;
    b.dones(k) = t.terminal ? 1.0 : 0.0;
  }
  return b;
}

Batch ReplayBuffer::sample(int batch_size, std::mt19937_64& rng) const {
  if (batch_size < 1 || static_cast<std::size_t>(batch_size) > count_) {
    throw std::invalid_argument("batch size exceeds replay occupancy");
  }
  std::uniform_int_distribution<std::size_t> pick(0, count_ - 1);
  std::vector<std::size_t> idx(static_cast<std::size_t>(batch_size));
  for (auto& i : idx) i = pick(rng);
  return gather(idx);
}

MotionFeature ReplayBuffer::feature(std::size_t i, bool next) const {
  if (i >= count_) throw std::out_of_range("replay index out of range");
  const Transition& t = transitions_[slot(i)];
  const ObsRef& ref = next ? t.next : t.obs;
  MotionFeature f;
  f.rows = spec_.rows;
  f.beams = spec_.beams;
  f.matrix.resize(static_cast<std::size_t>(f.rows) * f.beams);
  fill_image(ref, f.matrix.data());
  for (double& v : f.matrix) v *= spec_.range_scale;
  f.goal = ref.goal;
  f.goal_reference = ref.goal_reference;
  return f;
}

// ---------------------------------------------------------------------------
// Checkpoint container

namespace {

constexpr char kMagic[8] = {'S', 'N', 'C', 'K', 'P', 'T', '0', '1'};

template <class T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint truncated");
  return value;
}

NamedTensor to_tensor(const std::string& name, const nn::Matrix& m) {
  NamedTensor t{name, {m.rows(), m.cols()}, {}};
  t.values.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) t.values.push_back(m(i, j));
  }
  return t;
}

void from_tensor(const Checkpoint& ck, const std::string& name, nn::Matrix& m) {
  const NamedTensor* t = ck.find(name);
  if (t == nullptr) throw std::runtime_error("checkpoint is missing tensor " + name);
  if (t->shape.size() != 2 || t->shape[0] != m.rows() || t->shape[1] != m.cols()) {
    throw std::runtime_error("checkpoint tensor " + name + " has the wrong shape");
  }
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = t->values[k++];
  }
}

void append_params(Checkpoint& ck, const std::string& prefix,
                   const std::vector<nn::Parameter*>& params) {
  for (const nn::Parameter* p : params) ck.tensors.push_back(to_tensor(prefix + p->name, p->value));
}

void restore_params(const Checkpoint& ck, const std::string& prefix,
                    const std::vector<nn::Parameter*>& params) {
  for (nn::Parameter* p : params) from_tensor(ck, prefix + p->name, p->value);
}

void append_adam(Checkpoint& ck, const std::string& prefix, const nn::Adam& opt,
                 const std::vector<nn::Parameter*>& params) {
  if (opt.first_moments().size() != params.size()) return;  // never stepped
  for (std::size_t i = 0; i < params.size(); ++i) {
    ck.tensors.push_back(to_tensor(prefix + ".m." + params[i]->name, opt.first_moments()[i]));
    ck.tensors.push_back(to_tensor(prefix + ".v." + params[i]->name, opt.second_moments()[i]));
  }
}

void restore_adam(const Checkpoint& ck, const std::string& prefix, nn::Adam& opt,
                  const std::vector<nn::Parameter*>& params, long long steps) {
  if (steps == 0 || params.empty() || ck.find(prefix + ".m." + params[0]->name) == nullptr) {
    return;
  }
  opt.first_moments().clear();
  opt.second_moments().clear();
  for (const nn::Parameter* p : params) {
    nn::Matrix m(p->value.rows(), p->value.cols());
    nn::Matrix v(p->value.rows(), p->value.cols());
    from_tensor(ck, prefix + ".m." + p->name, m);
    from_tensor(ck, prefix + ".v." + p->name, v);
    opt.first_moments().push_back(std::move(m));
    opt.second_moments().push_back(std::move(v));
  }
  opt.set_step_count(steps);
}

}  // namespace

const NamedTensor* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes little-endian");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const std::string meta = checkpoint.metadata.dump();
  write_pod<std::uint64_t>(out, meta.size());
  out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  write_pod<std::uint64_t>(out, checkpoint.tensors.size());
  for (const NamedTensor& t : checkpoint.tensors) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (std::int64_t d : t.shape) write_pod<std::int64_t>(out, d);
    out.write(reinterpret_cast<const char*>(t.values.data()),
              static_cast<std::streamsize>(t.values.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error(path.string() + " is not a checkpoint file");
  }
  Checkpoint ck;
  const auto meta_size = read_pod<std::uint64_t>(in);
  std::string meta(meta_size, '\0');
  in.read(meta.data(), static_cast<std::streamsize>(meta_size));
  if (!in) throw std::runtime_error("checkpoint truncated");
  ck.metadata = nlohmann::json::parse(meta);
  const auto count = read_pod<std::uint64_t>(in);
  for (std::uint64_t k = 0; k < count; ++k) {
    NamedTensor t;
    t.name.resize(read_pod<std::uint32_t>(in));
    in.read(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    const auto rank = read_pod<std::uint32_t>(in);
    std::int64_t total = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      t.shape.push_back(read_pod<std::int64_t>(in));
      if (t.shape.back() < 0) throw std::runtime_error("negative tensor dimension");
      total *= t.shape.back();
    }
    t.values.resize(static_cast<std::size_t>(total));
    in.read(reinterpret_cast<char*>(t.values.data()),
            static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint truncated in tensor " + t.name);
    ck.tensors.push_back(std::move(t));
  }
  return ck;
}

std::string config_hash(const NetworkSpec& spec, const LidarConfig& lidar) {
  nlohmann::json j = {{"network", spec.to_json()},
                      {"lidar",
                       {{"beams", lidar.beams},
                        {"fov", lidar.fov},
                        {"range_min", lidar.range_min},
                        {"range_max", lidar.range_max}}}};
  std::ostringstream out;
  out << std::hex << fnv1a(j.dump());
  return out.str();
}

// ---------------------------------------------------------------------------
// DDPG

nlohmann::json DdpgConfig::to_json() const {
  return {{"gamma", gamma},           {"tau", tau},
          {"lr_actor", lr_actor},     {"lr_critic", lr_critic},
          {"batch_size", batch_size}, {"buffer_capacity", buffer_capacity},
          {"reward_scale", reward_scale}};
}

DdpgConfig DdpgConfig::from_json(const nlohmann::json& j) {
  DdpgConfig c;
  c.gamma = j.value("gamma", c.gamma);
  c.tau = j.value("tau", c.tau);
  c.lr_actor = j.value("lr_actor", c.lr_actor);
  c.lr_critic = j.value("lr_critic", c.lr_critic);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
  c.reward_scale = j.value("reward_scale", c.reward_scale);
  return c;
}

void copy_parameters(const std::vector<nn::Parameter*>& from,
                     const std::vector<nn::Parameter*>& to) {
  if (from.size() != to.size()) throw std::invalid_argument("parameter lists differ");
  for (std::size_t i = 0; i < from.size(); ++i) to[i]->value = from[i]->value;
}

namespace {
std::mt19937_64 seeded(std::uint64_t seed, std::string_view tag) {
  return std::mt19937_64(derive_seed(seed, tag));
}
}  // namespace

DdpgAgent::DdpgAgent(const NetworkSpec& spec, const DdpgConfig& config, std::uint64_t seed)
    : spec_(spec),
      config_(config),
      actor_([&] {
        auto rng = seeded(seed, "actor-init");
        return ActorNet(spec, rng);
      }()),
      critic_([&] {
        auto rng = seeded(seed, "critic-init");
        return CriticNet(spec, rng);
      }()),
      target_actor_(actor_),
      target_critic_(critic_),
      actor_opt_(config.lr_actor),
      critic_opt_(config.lr_critic) {}

nn::Vector DdpgAgent::critic_targets(const Batch& batch) {
  const nn::Matrix next_actions = target_actor_.forward(batch.next_images, batch.next_goals);
  const nn::Matrix next_q =
      target_critic_.forward(batch.next_images, batch.next_goals, next_actions);
  nn::Vector y = config_.reward_scale * batch.rewards;
  y.array() += config_.gamma * (1.0 - batch.dones.array()) * next_q.row(0).transpose().array();
  return y;
}

UpdateStats DdpgAgent::update(const Batch& batch) {
  const double n = static_cast<double>(batch.size());
  UpdateStats stats;

  const nn::Vector y = critic_targets(batch);
  auto critic_params = critic_.parameters();
  nn::zero_grad(critic_params);
  const nn::Matrix q = critic_.forward(batch.images, batch.goals, batch.actions);
  const nn::Matrix diff = q - y.transpose();
  stats.critic_loss = diff.squaredNorm() / n;
  critic_.backward(diff * (2.0 / n));
  critic_opt_.step(critic_params);

  auto actor_params = actor_.parameters();
  nn::zero_grad(actor_params);
  const nn::Matrix policy_actions = actor_.forward(batch.images, batch.goals);
  const nn::Matrix policy_q = critic_.forward(batch.images, batch.goals, policy_actions);
  stats.actor_objective = policy_q.mean();
  const nn::Matrix grad_q = nn::Matrix::Constant(1, batch.size(), -1.0 / n);
  actor_.backward(critic_.action_gradient(grad_q));
  actor_opt_.step(actor_params);

  soft_update(config_.tau);
  ++updates_;
  return stats;
}

void DdpgAgent::soft_update(double tau) {
  const auto blend = [tau](const std::vector<nn::Parameter*>& online,
                           const std::vector<nn::Parameter*>& target) {
    for (std::size_t i = 0; i < online.size(); ++i) {
      if (tau == 1.0) {
        target[i]->value = online[i]->value;
      } else {
        target[i]->value = tau * online[i]->value + (1.0 - tau) * target[i]->value;
      }
    }
  };
  blend(actor_.parameters(), target_actor_.parameters());
  blend(critic_.parameters(), target_critic_.parameters());
}

Checkpoint DdpgAgent::to_checkpoint(const nlohmann::json& extra_metadata) {
  Checkpoint ck;
  ck.metadata = {{"format", "socnav-checkpoint"},
                 {"version", 1},
                 {"network", spec_.to_json()},
                 {"ddpg", config_.to_json()},
                 {"updates", updates_},
                 {"actor_adam_steps", actor_opt_.step_count()},
                 {"critic_adam_steps", critic_opt_.step_count()}};
  if (extra_metadata.is_object()) {
    for (const auto& [key, value] : extra_metadata.items()) ck.metadata[key] = value;
  }
  append_params(ck, "", actor_.parameters());
  append_params(ck, "", critic_.parameters());
  append_params(ck, "target.", target_actor_.parameters());
  append_params(ck, "target.", target_critic_.parameters());
  append_adam(ck, "adam.actor", actor_opt_, actor_.parameters());
  append_adam(ck, "adam.critic", critic_opt_, critic_.parameters());
  return ck;
}

void DdpgAgent::load(const Checkpoint& ck) {
  restore_params(ck, "", actor_.parameters());
  restore_params(ck, "", critic_.parameters());
  restore_params(ck, "target.", target_actor_.parameters());
  restore_params(ck, "target.", target_critic_.parameters());
  restore_adam(ck, "adam.actor", actor_opt_, actor_.parameters(),
               ck.metadata.value("actor_adam_steps", 0LL));
  restore_adam(ck, "adam.critic", critic_opt_, critic_.parameters(),
               ck.metadata.value("critic_adam_steps", 0LL));
  updates_ = ck.metadata.value("updates", 0LL);
}

DdpgAgent DdpgAgent::from_checkpoint(const Checkpoint& ck) {
  const NetworkSpec spec = NetworkSpec::from_json(ck.metadata.at("network"));
  const DdpgConfig config = DdpgConfig::from_json(ck.metadata.value("ddpg", nlohmann::json::object()));
  DdpgAgent agent(spec, config, 0);
  agent.load(ck);
  return agent;
}

}  // namespace socnav
