#include "ada/learning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "ada/error.hpp"
#include "ada/parallel.hpp"
#include "ada/text_format.hpp"

namespace ada {

void Dataset::validate() const {
  if (examples.empty()) throw DataError("dataset is empty");
  const Eigen::Index dim = examples.front().features.dim();
  for (const auto& ex : examples) {
    ex.features.validate();
    if (ex.features.size() != static_cast<Eigen::Index>(ex.proposals.size()))
      throw DataError(ex.image_id + ": feature rows do not match proposal count");
    if (ex.features.dim() != dim)
      throw DataError(ex.image_id + ": feature dimension " + std::to_string(ex.features.dim()) +
                      " differs from " + std::to_string(dim));
    if (!ex.proposals[ex.gt_index()].same_coordinates(ex.gt))
      throw DataError(ex.image_id + ": gt_index does not point at the ground-truth box");
  }
}

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kAda:
      return "ada";
    case ObjectiveKind::kSsvm:
      return "ssvm";
    case ObjectiveKind::kSoftmax:
      return "softmax";
  }
  return "?";
}

ObjectiveKind parse_objective(const std::string& name) {
  if (name == "ada") return ObjectiveKind::kAda;
  if (name == "ssvm") return ObjectiveKind::kSsvm;
  if (name == "softmax") return ObjectiveKind::kSoftmax;
  throw UsageError("unknown objective '" + name + "' (expected ada, ssvm or softmax)");
}

void TrainConfig::validate() const {
  if (epochs < 0) throw UsageError("epochs must be >= 0");
  if (!(learning_rate > 0)) throw UsageError("learning rate must be > 0");
  if (!(adagrad_epsilon > 0)) throw UsageError("AdaGrad epsilon must be > 0");
  if (minibatch < 1) throw UsageError("minibatch must be >= 1");
  if (!(oracle_eps > 0)) throw UsageError("double-oracle eps must be > 0");
  if (!(tolerance >= 0)) throw UsageError("tolerance must be >= 0");
  if (!(ssvm_lambda > 0)) throw UsageError("SSVM lambda must be > 0");
  if (ssvm_rounds < 0 || ssvm_inner_iterations < 1) throw UsageError("bad SSVM iteration counts");
  if (!(ssvm_step > 0) || !(ssvm_tolerance > 0)) throw UsageError("bad SSVM step or tolerance");
  if (!(softmax_positive_iou >= 0 && softmax_positive_iou <= 1))
    throw UsageError("softmax positive IoU must lie in [0, 1]");
  if (jobs < 1) throw UsageError("jobs must be >= 1");
}

bool ThetaModel::operator==(const ThetaModel& o) const {
  return theta.size() == o.theta.size() && theta == o.theta && objective == o.objective &&
         class_id == o.class_id && loss == o.loss && extractor == o.extractor &&
         meta.epochs_run == o.meta.epochs_run &&
         meta.final_gradient_norm == o.meta.final_gradient_norm && meta.seed == o.meta.seed &&
         meta.lambda == o.meta.lambda;
}

Eigen::VectorXd ada_gradient(const Eigen::VectorXd& p, const FeatureMatrix& features) {
  if (p.size() != features.size())
    throw DataError("adversary distribution has " + std::to_string(p.size()) +
                    " entries for " + std::to_string(features.size()) + " feature rows");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(features.dim());
  for (Eigen::Index j = 0; j < p.size(); ++j)
    if (p[j] != 0.0) g += p[j] * features.rows.row(j).transpose();
  g -= features.rows.row(static_cast<Eigen::Index>(features.gt_index)).transpose();
  return g;
}

Eigen::MatrixXd example_loss_matrix(const Example& example, const LossSpec& loss) {
  return loss_matrix(example.proposals.boxes(), example.proposals.boxes(), loss);
}

Equilibrium solve_example_game(const Eigen::VectorXd& theta, const Example& example,
                               const Eigen::MatrixXd& loss_matrix,
                               const DoubleOracleOptions& options) {
  try {
    return double_oracle(loss_matrix, potentials(theta, example.features), options);
  } catch (const SolverError& e) {
    throw SolverError("image '" + example.image_id + "': " + e.what());
  }
}

namespace {

std::vector<Eigen::MatrixXd> all_loss_matrices(const Dataset& data, const LossSpec& loss,
                                               unsigned jobs) {
  std::vector<Eigen::MatrixXd> out(data.size());
  parallel_for(data.size(), jobs,
               [&](std::size_t i) { out[i] = example_loss_matrix(data.examples[i], loss); });
  return out;
}

DoubleOracleOptions oracle_options(const TrainConfig& config) {
  DoubleOracleOptions options;
  options.eps = config.oracle_eps;
  return options;
}

class AdaGrad {
 public:
  AdaGrad(Eigen::Index dim, double rate, double epsilon)
      : accum_(Eigen::VectorXd::Zero(dim)), rate_(rate), epsilon_(epsilon) {}

  // Returns the step to add for descent along -gradient.
  Eigen::VectorXd step(const Eigen::VectorXd& gradient) {
    accum_ += gradient.cwiseAbs2();
    return -rate_ * gradient.cwiseQuotient((accum_.array() + epsilon_).sqrt().matrix());
  }

 private:
  Eigen::VectorXd accum_;
  double rate_, epsilon_;
};

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

ThetaModel base_model(const Dataset& data, const TrainConfig& config, const LossSpec& loss,
                      ObjectiveKind kind) {
  ThetaModel model;
  model.theta = Eigen::VectorXd::Zero(data.examples.front().features.dim());
  model.objective = kind;
  model.class_id = data.examples.front().class_id;
  model.loss = loss;
  model.extractor = data.extractor;
  model.meta.seed = config.seed;
  return model;
}

}  // namespace

Eigen::VectorXd ada_residual(const Eigen::VectorXd& theta, const Dataset& data,
                             const std::vector<Eigen::MatrixXd>& loss_matrices,
                             const TrainConfig& config) {
  std::vector<Eigen::VectorXd> grads(data.size());
  const auto options = oracle_options(config);
  parallel_for(data.size(), config.jobs, [&](std::size_t i) {
    const auto eq = solve_example_game(theta, data.examples[i], loss_matrices[i], options);
    grads[i] = ada_gradient(eq.p, data.examples[i].features);
  });
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(theta.size());
  for (const auto& g : grads) mean += g;
  return mean / static_cast<double>(data.size());
}

ThetaModel train_ada(const Dataset& data, const TrainConfig& config, const LossSpec& loss,
                     const TrainObserver& observer) {
  data.validate();
  config.validate();
  loss.validate();
  ThetaModel model = base_model(data, config, loss, ObjectiveKind::kAda);
  const auto losses = all_loss_matrices(data, loss, config.jobs);
  const auto options = oracle_options(config);

  AdaGrad optimizer(model.theta.size(), config.learning_rate, config.adagrad_epsilon);
  std::mt19937_64 rng(config.seed);
  auto order = iota_indices(data.size());
  std::vector<Eigen::VectorXd> grads(data.size());

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::VectorXd epoch_sum = Eigen::VectorXd::Zero(model.theta.size());
    for (std::size_t start = 0; start < order.size(); start += config.minibatch) {
      const std::size_t count = std::min(config.minibatch, order.size() - start);
      parallel_for(count, config.jobs, [&](std::size_t b) {
        const std::size_t i = order[start + b];
        const auto eq = solve_example_game(model.theta, data.examples[i], losses[i], options);
        grads[i] = ada_gradient(eq.p, data.examples[i].features);
      });
      Eigen::VectorXd batch = Eigen::VectorXd::Zero(model.theta.size());
      for (std::size_t b = 0; b < count; ++b) batch += grads[order[start + b]];
      epoch_sum += batch;
      batch /= static_cast<double>(count);
      model.theta += optimizer.step(batch);
    }
    const double residual = (epoch_sum / static_cast<double>(data.size())).lpNorm<Eigen::Infinity>();
    model.meta.epochs_run = epoch;
    model.meta.final_gradient_norm = residual;
    if (observer) observer({epoch, residual, 0.0});
    if (residual <= config.tolerance) break;
  }
  return model;
}

// ---------------------------------------------------------------------------
// Structured SVM

namespace {

struct Constraint {
  double loss;
  Eigen::VectorXd delta;  // phi(y*) - phi(y)
};

double hinge(const Constraint& c, const Eigen::VectorXd& theta) {
  return c.loss - theta.dot(c.delta);
}

struct WorkingSets {
  std::vector<std::vector<std::size_t>> labels;
  std::vector<std::vector<Constraint>> constraints;
};

// max(0, max over the working set of loss - theta'delta).
double slack(const std::vector<Constraint>& set, const Eigen::VectorXd& theta) {
  double xi = 0.0;
  for (const auto& c : set) xi = std::max(xi, hinge(c, theta));
  return xi;
}

double restricted_objective(const WorkingSets& ws, const Eigen::VectorXd& theta, double lambda) {
  double total = 0.0;
  for (const auto& set : ws.constraints) total += slack(set, theta);
  return lambda * theta.norm() + total / static_cast<double>(ws.constraints.size());
}

// Subgradient descent with normalized steps eta0 / sqrt(t), keeping the best
// iterate.
Eigen::VectorXd solve_restricted(const WorkingSets& ws, Eigen::VectorXd theta,
                                 const TrainConfig& config) {
  const double n = static_cast<double>(ws.constraints.size());
  Eigen::VectorXd best = theta;
  double best_value = restricted_objective(ws, theta, config.ssvm_lambda);
  Eigen::VectorXd g(theta.size());
  for (int t = 1; t <= config.ssvm_inner_iterations; ++t) {
    g.setZero();
    const double norm = theta.norm();
    if (norm > 0.0) g += config.ssvm_lambda * theta / norm;
    for (const auto& set : ws.constraints) {
      const Constraint* worst = nullptr;
      double worst_value = 0.0;
      for (const auto& c : set) {
        const double h = hinge(c, theta);
        if (h > worst_value) {
          worst_value = h;
          worst = &c;
        }
      }
      if (worst) g -= worst->delta / n;
    }
    const double gnorm = g.norm();
    if (gnorm == 0.0) break;
    theta -= (config.ssvm_step / std::sqrt(static_cast<double>(t))) * g / gnorm;
    const double value = restricted_objective(ws, theta, config.ssvm_lambda);
    if (value < best_value) {
      best_value = value;
      best = theta;
    }
  }
  return best;
}

}  // namespace

double ssvm_objective(const Eigen::VectorXd& theta, const Dataset& data, const LossSpec& loss,
                      double lambda) {
  double total = 0.0;
  for (const auto& ex : data.examples) {
    const Eigen::VectorXd scores = linear_scores(theta, ex.features);
    const double gt_score = scores[static_cast<Eigen::Index>(ex.gt_index())];
    double xi = 0.0;
    for (std::size_t y = 0; y < ex.proposals.size(); ++y)
      xi = std::max(xi, ada::loss(ex.gt, ex.proposals[y], loss) -
                            (gt_score - scores[static_cast<Eigen::Index>(y)]));
    total += xi;
  }
  return lambda * theta.norm() + total / static_cast<double>(data.size());
}

ThetaModel train_ssvm(const Dataset& data, const TrainConfig& config, const LossSpec& loss,
                      const TrainObserver& observer) {
  data.validate();
  config.validate();
  loss.validate();
  ThetaModel model = base_model(data, config, loss, ObjectiveKind::kSsvm);
  model.meta.lambda = config.ssvm_lambda;
  const std::size_t n = data.size();

  // loss(y*, y) per example and proposal.
  std::vector<Eigen::VectorXd> gt_loss(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ex = data.examples[i];
    gt_loss[i].resize(static_cast<Eigen::Index>(ex.proposals.size()));
    for (std::size_t y = 0; y < ex.proposals.size(); ++y)
      gt_loss[i][static_cast<Eigen::Index>(y)] = ada::loss(ex.gt, ex.proposals[y], loss);
  }

  WorkingSets ws;
  ws.labels.resize(n);
  ws.constraints.resize(n);
  double max_violation = 0.0;
  for (int round = 1; round <= config.ssvm_rounds; ++round) {
    std::size_t added = 0;
    max_violation = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& ex = data.examples[i];
      const Eigen::VectorXd scores = linear_scores(model.theta, ex.features);
      // Loss-augmented inference: argmax_y loss(y*, y) + theta'phi(y).
      Eigen::Index y_hat = 0;
      (gt_loss[i] + scores).maxCoeff(&y_hat);
      const auto& gt_row = ex.features.rows.row(static_cast<Eigen::Index>(ex.gt_index()));
      Constraint c{gt_loss[i][y_hat], (gt_row - ex.features.rows.row(y_hat)).transpose()};
      const double violation = hinge(c, model.theta) - slack(ws.constraints[i], model.theta);
      max_violation = std::max(max_violation, violation);
      if (violation > config.ssvm_tolerance &&
          std::find(ws.labels[i].begin(), ws.labels[i].end(), static_cast<std::size_t>(y_hat)) ==
              ws.labels[i].end()) {
        ws.labels[i].push_back(static_cast<std::size_t>(y_hat));
        ws.constraints[i].push_back(std::move(c));
        ++added;
      }
    }
    model.meta.epochs_run = round;
    model.meta.final_gradient_norm = max_violation;
    if (added == 0) {
      if (observer)
        observer({round, max_violation, ssvm_objective(model.theta, data, loss, config.ssvm_lambda)});
      break;
    }
    model.theta = solve_restricted(ws, model.theta, config);
    if (observer)
      observer({round, max_violation, ssvm_objective(model.theta, data, loss, config.ssvm_lambda)});
  }
  return model;
}

// ---------------------------------------------------------------------------
// Softmax

namespace {

struct SoftmaxTerms {
  double log_partition;
  Eigen::VectorXd mean_feature;
};

SoftmaxTerms softmax_terms(const Eigen::VectorXd& scores, const Eigen::MatrixXd& rows,
                           const std::vector<Eigen::Index>& subset) {
  double top = -std::numeric_limits<double>::infinity();
  for (auto i : subset) top = std::max(top, scores[i]);
  double z = 0.0;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(rows.cols());
  for (auto i : subset) {
    const double w = std::exp(scores[i] - top);
    z += w;
    mean += w * rows.row(i).transpose();
  }
  return {top + std::log(z), mean / z};
}

std::vector<std::vector<Eigen::Index>> positive_sets(const Dataset& data, double positive_iou) {
  std::vector<std::vector<Eigen::Index>> out(data.size());
  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto& ex = data.examples[n];
    for (std::size_t y = 0; y < ex.proposals.size(); ++y)
      if (iou(ex.proposals[y], ex.gt) >= positive_iou) out[n].push_back(static_cast<Eigen::Index>(y));
    if (out[n].empty())
      throw DataError("image '" + ex.image_id + "' has no proposal with IoU >= " +
                      text::format_double(positive_iou) + " to its ground truth");
  }
  return out;
}

std::vector<Eigen::Index> all_indices(const Example& ex) {
  std::vector<Eigen::Index> v(ex.proposals.size());
  std::iota(v.begin(), v.end(), Eigen::Index{0});
  return v;
}

// Per-example log-likelihood and its gradient.
std::pair<double, Eigen::VectorXd> softmax_term(const Eigen::VectorXd& theta, const Example& ex,
                                                const std::vector<Eigen::Index>& positives) {
  const Eigen::VectorXd scores = linear_scores(theta, ex.features);
  const auto pos = softmax_terms(scores, ex.features.rows, positives);
  const auto all = softmax_terms(scores, ex.features.rows, all_indices(ex));
  return {pos.log_partition - all.log_partition, pos.mean_feature - all.mean_feature};
}

}  // namespace

double softmax_objective(const Eigen::VectorXd& theta, const Dataset& data,
                         double positive_iou) {
  const auto positives = positive_sets(data, positive_iou);
  double total = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n)
    total += softmax_term(theta, data.examples[n], positives[n]).first;
  return total / static_cast<double>(data.size());
}

ThetaModel train_softmax(const Dataset& data, const TrainConfig& config, const LossSpec& loss,
                         const TrainObserver& observer) {
  data.validate();
  config.validate();
  loss.validate();
  ThetaModel model = base_model(data, config, loss, ObjectiveKind::kSoftmax);
  const auto positives = positive_sets(data, config.softmax_positive_iou);

  AdaGrad optimizer(model.theta.size(), config.learning_rate, config.adagrad_epsilon);
  std::mt19937_64 rng(config.seed);
  auto order = iota_indices(data.size());
  std::vector<Eigen::VectorXd> grads(data.size());

  auto full_batch = [&](const Eigen::VectorXd& theta) {
    std::vector<std::pair<double, Eigen::VectorXd>> terms(data.size());
    parallel_for(data.size(), config.jobs, [&](std::size_t n) {
      terms[n] = softmax_term(theta, data.examples[n], positives[n]);
    });
    double value = 0.0;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.size());
    for (const auto& [v, g] : terms) {
      value += v;
      grad += g;
    }
    const double scale = 1.0 / static_cast<double>(data.size());
    return std::pair{value * scale, Eigen::VectorXd(grad * scale)};
  };

  // Full-batch runs only accept steps that do not lower the objective,
  // halving the AdaGrad step until one does.
  const bool full = config.minibatch >= data.size();
  double current = full ? full_batch(model.theta).first : 0.0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += config.minibatch) {
      const std::size_t count = std::min(config.minibatch, order.size() - start);
      parallel_for(count, config.jobs, [&](std::size_t b) {
        const std::size_t i = order[start + b];
        grads[i] = softmax_term(model.theta, data.examples[i], positives[i]).second;
      });
      Eigen::VectorXd batch = Eigen::VectorXd::Zero(model.theta.size());
      for (std::size_t b = 0; b < count; ++b) batch += grads[order[start + b]];
      batch /= static_cast<double>(count);
      // Ascent: AdaGrad steps along +gradient.
      Eigen::VectorXd step = -optimizer.step(batch);
      if (!full) {
        model.theta += step;
        continue;
      }
      for (int halving = 0; halving < 50; ++halving, step *= 0.5) {
        const Eigen::VectorXd candidate = model.theta + step;
        const double value = full_batch(candidate).first;
        if (value >= current) {
          model.theta = candidate;
          current = value;
          break;
        }
      }
    }
    const auto [value, grad] = full_batch(model.theta);
    const double norm = grad.lpNorm<Eigen::Infinity>();
    model.meta.epochs_run = epoch;
    model.meta.final_gradient_norm = norm;
    if (observer) observer({epoch, norm, value});
    if (norm <= config.tolerance) break;
  }
  return model;
}

// ---------------------------------------------------------------------------
// Model files

namespace {

constexpr const char* kModelMagic = "ada-model 1";

std::string loss_name(const LossSpec& loss) {
  return loss.kind == LossKind::kOverlap ? "overlap" : "thresholded";
}

}  // namespace

std::string format_models(const std::vector<ThetaModel>& models) {
  std::ostringstream out;
  out << kModelMagic << "\n";
  for (const auto& m : models) {
    out << "[model]\n";
    out << "objective = " << to_string(m.objective) << "\n";
    out << "class_id = " << m.class_id << "\n";
    out << "loss = " << loss_name(m.loss) << "\n";
    out << "alpha = " << text::format_double(m.loss.alpha) << "\n";
    out << "extractor = " << to_string(m.extractor.kind) << "\n";
    out << "bins = " << m.extractor.bins << "\n";
    out << "normalize = " << (m.extractor.normalize ? 1 : 0) << "\n";
    out << "dim = " << m.theta.size() << "\n";
    out << "epochs_run = " << m.meta.epochs_run << "\n";
    out << "final_gradient_norm = " << text::format_double(m.meta.final_gradient_norm) << "\n";
    out << "seed = " << m.meta.seed << "\n";
    out << "lambda = " << text::format_double(m.meta.lambda) << "\n";
    std::vector<double> theta(m.theta.data(), m.theta.data() + m.theta.size());
    out << "theta = " << text::format_vector(theta) << "\n";
    out << "[end]\n";
  }
  return out.str();
}

std::vector<ThetaModel> parse_models(const std::string& contents, const std::string& context) {
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(context + ": empty model file");
  ++line_no;
  if (text::trim(line) != kModelMagic)
    throw DataError(context + ": unsupported model version tag '" + std::string(text::trim(line)) +
                    "' (expected '" + kModelMagic + "')");
  std::vector<ThetaModel> models;
  std::map<std::string, std::string> fields;
  bool open = false;
  auto finish = [&](std::size_t at) {
    const std::string ctx = context + ":" + std::to_string(at);
    auto need = [&](const char* key) -> const std::string& {
      auto it = fields.find(key);
      if (it == fields.end()) throw DataError(ctx + ": model block is missing '" + key + "'");
      return it->second;
    };
    ThetaModel m;
    try {
      m.objective = parse_objective(need("objective"));
      m.extractor.kind = parse_extractor_kind(need("extractor"));
    } catch (const UsageError& e) {
      throw DataError(ctx + ": " + e.what());
    }
    m.class_id = static_cast<int>(text::parse_int(need("class_id"), ctx));
    const auto& loss = need("loss");
    if (loss == "overlap")
      m.loss.kind = LossKind::kOverlap;
    else if (loss == "thresholded")
      m.loss.kind = LossKind::kThresholded;
    else
      throw DataError(ctx + ": unknown loss '" + loss + "'");
    m.loss.alpha = text::parse_double(need("alpha"), ctx);
    m.extractor.bins = static_cast<int>(text::parse_int(need("bins"), ctx));
    m.extractor.normalize = text::parse_int(need("normalize"), ctx) != 0;
    const auto dim = text::parse_int(need("dim"), ctx);
    m.meta.epochs_run = static_cast<int>(text::parse_int(need("epochs_run"), ctx));
    m.meta.final_gradient_norm = text::parse_double(need("final_gradient_norm"), ctx);
    m.meta.seed = static_cast<std::uint64_t>(std::stoull(need("seed")));
    m.meta.lambda = text::parse_double(need("lambda"), ctx);
    const auto values = text::split(need("theta"), " \t");
    if (static_cast<long long>(values.size()) != dim || dim < 1)
      throw DataError(ctx + ": theta has " + std::to_string(values.size()) +
                      " values but dim = " + std::to_string(dim));
    m.theta.resize(dim);
    for (long long k = 0; k < dim; ++k) m.theta[k] = text::parse_double(values[k], ctx);
    models.push_back(std::move(m));
    fields.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = text::trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (view == "[model]") {
      if (open) throw DataError(context + ":" + std::to_string(line_no) + ": unterminated block");
      open = true;
    } else if (view == "[end]") {
      if (!open) throw DataError(context + ":" + std::to_string(line_no) + ": stray [end]");
      finish(line_no);
      open = false;
    } else {
      const auto eq = view.find('=');
      if (!open || eq == std::string_view::npos)
        throw DataError(context + ":" + std::to_string(line_no) + ": malformed line");
      fields[std::string(text::trim(view.substr(0, eq)))] = std::string(text::trim(view.substr(eq + 1)));
    }
  }
  if (open) throw DataError(context + ": truncated model file (missing [end])");
  if (models.empty()) throw DataError(context + ": no models in file");
  return models;
}

void save_models(const std::vector<ThetaModel>& models, const std::string& path) {
  text::write_file(path, format_models(models));
}

std::vector<ThetaModel> load_models(const std::string& path) {
  return parse_models(text::read_file(path), path);
}

void save_model(const ThetaModel& model, const std::string& path) { save_models({model}, path); }

ThetaModel load_model(const std::string& path) {
  auto models = load_models(path);
  if (models.size() != 1)
    throw DataError(path + ": expected one model, found " + std::to_string(models.size()));
  return models.front();
}

}  // namespace ada
