#include "hqrc/forecast.hpp"

#include "hqrc/parallel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hqrc {

RealMatrix augment_design(const RealMatrix& design) {
  RealMatrix out = design;
  for (Index c = 2; c < out.cols(); c += 2) out.col(c) = out.col(c).cwiseProduct(out.col(c));
  return out;
}

RealVector augment_signals(const RealVector& z) {
  RealVector out = z;
  for (Index i = 1; i < out.size(); i += 2) out(i) *= out(i);
  return out;
}

TeacherForceResult teacher_force(HqrSystem& sys, const RealMatrix& series, int washout, int k,
                                 Real beta, bool augment) {
  if (series.rows() < washout + k + 1)
    throw std::invalid_argument("teacher_force: series shorter than washout + K + 1");
  if (series.cols() != sys.n_in())
    throw std::invalid_argument("teacher_force: series dimension does not match the input");

  TeacherForceResult result;
  result.signals = RealMatrix(k, sys.n_total());
  for (int step = 0; step < washout + k; ++step) {
    hqr_step(sys, RealVector(series.row(step)));
    if (step >= washout) result.signals.row(step - washout) = sys.signal;
  }

  RealMatrix design = assemble_design(result.signals);
  if (augment) design = augment_design(design);
  const RealMatrix targets = series.middleRows(washout + 1, k);
  result.model = ridge_fit(design, targets, beta);
  return result;
}

ClosedLoopResult closed_loop(HqrSystem& sys, const ReadoutModel& model, int steps, bool augment) {
  ClosedLoopResult result;
  result.predictions = RealMatrix::Zero(steps, model.d_out());
  for (int t = 0; t < steps; ++t) {
    const RealVector z = augment ? augment_signals(sys.signal) : sys.signal;
    RealVector p = predict(model, z);
    if (!p.allFinite()) return result;  // partial series
    for (Index i = 0; i < p.size(); ++i) {
      if (p(i) < 0.0 || p(i) > 1.0) {
        p(i) = clamp01(p(i));
        ++result.clamp_events;
      }
    }
    result.predictions.row(t) = p;
    result.valid_steps = t + 1;
    hqr_step(sys, p);
  }
  return result;
}

RealMatrix rewire_feedback(const RealMatrix& w_con, const RealMatrix& w_out_replicated,
                           Real alpha) {
  if (w_con.rows() != w_out_replicated.rows() || w_con.cols() != w_out_replicated.cols())
    throw std::invalid_argument("rewire_feedback: dimension mismatch");
  return (1.0 - alpha) * w_out_replicated + alpha * w_con;
}

FoldedReadout fold_readout(const ReadoutModel& model, const RealMatrix& w_in) {
  if (w_in.cols() != model.d_out())
    throw std::invalid_argument("fold_readout: W_in columns must match the readout outputs");
  FoldedReadout folded;
  folded.w_out = w_in * model.weights.bottomRows(model.n_signals()).transpose();
  folded.bias = w_in * model.weights.row(0).transpose();
  return folded;
}

RealMatrix run_rewired(HqrSystem& sys, const RealMatrix& w_con_prime, const RealVector& bias,
                       bool augment, int steps) {
  if (w_con_prime.rows() != sys.n_qr() || w_con_prime.cols() != sys.n_total())
    throw std::invalid_argument("run_rewired: rewired matrix shape mismatch");
  RealMatrix signals(steps, sys.n_total());
  for (int t = 0; t < steps; ++t) {
    const RealVector z = augment ? augment_signals(sys.signal) : sys.signal;
    RealVector mixed = w_con_prime * z + bias;
    for (Index i = 0; i < mixed.size(); ++i) mixed(i) = clamp01(mixed(i));
    for (int l = 0; l < sys.n_qr(); ++l) {
      const int offset = sys.coupling.block_offsets[l];
      qr_step(sys.states[l], mixed(l), sys.configs[l],
              sys.signal.segment(offset, sys.configs[l].signal_size()));
    }
    ++sys.step_index;
    signals.row(t) = sys.signal;
  }
  return signals;
}

Real vpt(const RealMatrix& pred, const RealMatrix& target, const RealVector& sigma_hat,
         Real epsilon, Real lyapunov, Real dt) {
  if (pred.rows() == 0) throw std::invalid_argument("vpt: empty series");
  const RealVector errors = nrmse_series(pred, target, sigma_hat);
  Index valid = 0;
  while (valid < errors.size() && errors(valid) <= epsilon) ++valid;
  return Real(valid) * dt * lyapunov;
}

namespace {

// Columns of the haloed input window of group i (periodic wrap).
std::vector<int> halo_columns(const ParallelLayout& layout, int group) {
  std::vector<int> cols;
  for (int j = group - layout.halo; j <= group + layout.halo; ++j) {
    const int g = ((j % layout.groups) + layout.groups) % layout.groups;
    for (int w = 0; w < layout.group_width; ++w) cols.push_back(g * layout.group_width + w);
  }
  return cols;
}

RealMatrix gather_columns(const RealMatrix& m, const std::vector<int>& cols) {
  RealMatrix out(m.rows(), Index(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c) out.col(Index(c)) = m.col(cols[c]);
  return out;
}

}  // namespace

RealMatrix parallel_forecast(const ParallelLayout& layout, const RealMatrix& field_scaled,
                             int train_steps, int predict_steps) {
  const int m = layout.groups * layout.group_width;
  if (field_scaled.cols() != m)
    throw std::invalid_argument("parallel_forecast: field dimension must equal groups × width");
  if (field_scaled.rows() < layout.washout + train_steps + 1)
    throw std::invalid_argument("parallel_forecast: field series too short for training");

  std::vector<HqrSystem> systems(size_t(layout.groups));
  std::vector<ReadoutModel> models(size_t(layout.groups));
  std::vector<std::vector<int>> halos(size_t(layout.groups));

  parallel_for(size_t(layout.groups), layout.workers, [&](std::size_t i) {
    const int g = int(i);
    halos[i] = halo_columns(layout, g);
    HqrBuilder builder;
    builder.params = layout.group_params;
    builder.params.n_in = layout.input_dim();
    builder.seed = derive_seed(layout.seed, "group/" + std::to_string(g));
    systems[i] = builder.build();

    const RealMatrix inputs = gather_columns(field_scaled, halos[i]);
    HqrSystem& sys = systems[i];
    RealMatrix signals(train_steps, sys.n_total());
    for (int step = 0; step < layout.washout + train_steps; ++step) {
      hqr_step(sys, RealVector(inputs.row(step)));
      if (step >= layout.washout) signals.row(step - layout.washout) = sys.signal;
    }
    RealMatrix design = assemble_design(signals);
    if (layout.augment) design = augment_design(design);
    const RealMatrix targets = field_scaled.middleRows(layout.washout + 1, train_steps)
                                   .middleCols(g * layout.group_width, layout.group_width);
    models[i] = ridge_fit(design, targets, layout.ridge_beta);
  });

  // Closed loop: each group predicts its local region; the assembled field is
  // exchanged through the halos at every step.
  RealMatrix predicted(predict_steps, m);
  RealVector field_row(m);
  for (int t = 0; t < predict_steps; ++t) {
    parallel_for(size_t(layout.groups), layout.workers, [&](std::size_t i) {
      const int g = int(i);
      const RealVector z =
          layout.augment ? augment_signals(systems[i].signal) : systems[i].signal;
      RealVector p = predict(models[i], z);
      for (Index w = 0; w < p.size(); ++w) {
        if (!std::isfinite(p(w)))
          throw std::runtime_error("parallel_forecast: non-finite output in group " +
                                   std::to_string(g));
        p(w) = clamp01(p(w));
      }
      for (int w = 0; w < layout.group_width; ++w)
        field_row(g * layout.group_width + w) = p(w);
    });
    predicted.row(t) = field_row;
    parallel_for(size_t(layout.groups), layout.workers, [&](std::size_t i) {
      RealVector u(Index(halos[i].size()));
      for (size_t c = 0; c < halos[i].size(); ++c) u(Index(c)) = field_row(halos[i][c]);
      hqr_step(systems[i], u);
    });
  }
  return predicted;
}

}  // namespace hqrc
