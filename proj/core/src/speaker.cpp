// Copyright 2026 The trustauth Authors
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

#include "trustauth/speaker.hpp"

#include <cmath>
#include <random>

#include "trustauth/error.hpp"
#include "trustauth/wav.hpp"

namespace trustauth::speaker {

BaumWelchStats AccumulateStats(const Eigen::MatrixXd &frames, const gmm::DiagGmm &ubm) {
  if (frames.rows() > 0 && frames.cols() != ubm.dim()) {
    Fail(ErrorCode::kDimensionMismatch, "frames have dimension " + std::to_string(frames.cols()) +
                                            ", UBM expects " + std::to_string(ubm.dim()));
  }
  const int k = ubm.num_components();
  BaumWelchStats stats;
  stats.n = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(k, ubm.dim());
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    const Eigen::VectorXd gamma = ubm.Posteriors(frames.row(t).transpose());
    stats.n += gamma;
    raw.noalias() += gamma * frames.row(t);
  }
  stats.f = raw - stats.n.asDiagonal() * ubm.means();
  return stats;
}

void to_json(Json &j, const TotalVariabilityModel &m) {
  j = Json{{"type", "total_variability"}, {"t", MatrixToJson(m.t)}, {"ubm_digest", m.ubm_digest}};
}

void from_json(const Json &j, TotalVariabilityModel &m) {
  m.t = MatrixFromJson(j.at("t"));
  m.ubm_digest = j.value("ubm_digest", "");
  if (m.t.cols() < 1 || !m.t.allFinite()) Fail(ErrorCode::kInvalidArgument, "bad total-variability matrix");
}

TotalVariabilityModel InitTvMatrix(const gmm::DiagGmm &ubm, int rank, std::uint64_t seed) {
  if (rank < 1) Fail(ErrorCode::kInvalidArgument, "i-vector rank must be >= 1");
  const int k = ubm.num_components(), d = ubm.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  TotalVariabilityModel tv;
  tv.t.resize(static_cast<Eigen::Index>(k) * d, rank);
  for (int c = 0; c < k; ++c) {
    for (int j = 0; j < d; ++j) {
      const double scale = 0.1 * std::sqrt(ubm.variances()(c, j));
      for (int r = 0; r < rank; ++r) tv.t(static_cast<Eigen::Index>(c) * d + j, r) = scale * normal(rng);
    }
  }
  tv.ubm_digest = ubm.Digest();
  return tv;
}

namespace {

void CheckStats(const BaumWelchStats &s, const gmm::DiagGmm &ubm) {
  if (s.n.size() != ubm.num_components() || s.f.rows() != ubm.num_components() || s.f.cols() != ubm.dim()) {
    Fail(ErrorCode::kDimensionMismatch, "statistics do not match the UBM shape");
  }
}

// T_k' S_k^-1 T_k for every component.
std::vector<Eigen::MatrixXd> PrecisionProducts(const Eigen::MatrixXd &t, const gmm::DiagGmm &ubm) {
  const int d = ubm.dim();
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(ubm.num_components()));
  for (int c = 0; c < ubm.num_components(); ++c) {
    const auto block = t.middleRows(static_cast<Eigen::Index>(c) * d, d);
    const Eigen::VectorXd inv = ubm.variances().row(c).transpose().cwiseInverse();
    out[static_cast<std::size_t>(c)] = block.transpose() * inv.asDiagonal() * block;
  }
  return out;
}

// T' S^-1 F with F flattened component-major.
Eigen::VectorXd ProjectFirstOrder(const Eigen::MatrixXd &t, const gmm::DiagGmm &ubm, const Eigen::MatrixXd &f) {
  const int d = ubm.dim();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(t.cols());
  for (int c = 0; c < ubm.num_components(); ++c) {
    const Eigen::VectorXd scaled = f.row(c).transpose().cwiseQuotient(ubm.variances().row(c).transpose());
    out.noalias() += t.middleRows(static_cast<Eigen::Index>(c) * d, d).transpose() * scaled;
  }
  return out;
}

Eigen::MatrixXd Precision(const std::vector<Eigen::MatrixXd> &products, const Eigen::VectorXd &n, int rank) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(rank, rank);
  for (std::size_t c = 0; c < products.size(); ++c) {
    if (n[static_cast<Eigen::Index>(c)] != 0.0) l.noalias() += n[static_cast<Eigen::Index>(c)] * products[c];
  }
  return l;
}

}  // namespace

TotalVariabilityModel TrainTvMatrix(std::span<const BaumWelchStats> stats, const gmm::DiagGmm &ubm, int rank,
                                    int iterations, std::uint64_t seed, std::vector<std::string> *warnings) {
  TotalVariabilityModel tv = InitTvMatrix(ubm, rank, seed);
  if (iterations <= 0) return tv;
  if (stats.empty()) Fail(ErrorCode::kTooFewFrames, "no utterances for total-variability training");
  for (const auto &s : stats) CheckStats(s, ubm);
  if (static_cast<int>(stats.size()) < rank && warnings) {
    warnings->push_back("TooFewUtterances: " + std::to_string(stats.size()) + " utterances for rank " +
                        std::to_string(rank));
  }

  const int k = ubm.num_components(), d = ubm.dim();
  for (int it = 0; it < iterations; ++it) {
    const auto products = PrecisionProducts(tv.t, ubm);
    Eigen::MatrixXd c_acc = Eigen::MatrixXd::Zero(tv.t.rows(), rank);
    std::vector<Eigen::MatrixXd> a_acc(static_cast<std::size_t>(k), Eigen::MatrixXd::Zero(rank, rank));
    for (const auto &s : stats) {
      const Eigen::MatrixXd l = Precision(products, s.n, rank);
      Eigen::LLT<Eigen::MatrixXd> llt(l);
      if (llt.info() != Eigen::Success) Fail(ErrorCode::kSingularSystem, "posterior precision not positive definite");
      const Eigen::VectorXd w = llt.solve(ProjectFirstOrder(tv.t, ubm, s.f));
      const Eigen::MatrixXd second = llt.solve(Eigen::MatrixXd::Identity(rank, rank)) + w * w.transpose();
      for (int c = 0; c < k; ++c) {
        c_acc.middleRows(static_cast<Eigen::Index>(c) * d, d).noalias() += s.f.row(c).transpose() * w.transpose();
        if (s.n[c] != 0.0) a_acc[static_cast<std::size_t>(c)].noalias() += s.n[c] * second;
      }
    }
    for (int c = 0; c < k; ++c) {
      Eigen::MatrixXd a = a_acc[static_cast<std::size_t>(c)];
      Eigen::LLT<Eigen::MatrixXd> llt(a);
      if (llt.info() != Eigen::Success) {
        a += 1e-6 * Eigen::MatrixXd::Identity(rank, rank);
        llt.compute(a);
        if (llt.info() != Eigen::Success) Fail(ErrorCode::kSingularSystem, "singular posterior accumulator");
      }
      const Eigen::MatrixXd ck = c_acc.middleRows(static_cast<Eigen::Index>(c) * d, d);
      tv.t.middleRows(static_cast<Eigen::Index>(c) * d, d) = llt.solve(ck.transpose()).transpose();
    }
  }
  return tv;
}

Eigen::VectorXd ExtractIVector(const BaumWelchStats &stats, const gmm::DiagGmm &ubm,
                               const TotalVariabilityModel &tv) {
  CheckStats(stats, ubm);
  if (tv.t.rows() != static_cast<Eigen::Index>(ubm.num_components()) * ubm.dim()) {
    Fail(ErrorCode::kDimensionMismatch, "total-variability matrix does not match the UBM");
  }
  const int rank = tv.rank();
  Eigen::MatrixXd l = Precision(PrecisionProducts(tv.t, ubm), stats.n, rank);
  const Eigen::VectorXd b = ProjectFirstOrder(tv.t, ubm, stats.f);
  Eigen::LLT<Eigen::MatrixXd> llt(l);
  if (llt.info() != Eigen::Success) {
    l += 1e-10 * Eigen::MatrixXd::Identity(rank, rank);
    llt.compute(l);
    if (llt.info() != Eigen::Success) Fail(ErrorCode::kSingularSystem, "i-vector posterior is ill-conditioned");
  }
  return llt.solve(b);
}

double CosineSimilarity(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  if (a.size() != b.size()) {
    Fail(ErrorCode::kDimensionMismatch,
         "vectors of size " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  const double na = a.norm(), nb = b.norm();
  if (na < 1e-12 || nb < 1e-12) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

SpeakerModel::SpeakerModel(audio::FrontendConfig frontend, gmm::DiagGmm ubm, TotalVariabilityModel tv,
                           double min_voiced_seconds)
    : frontend_(std::move(frontend)),
      ubm_(std::move(ubm)),
      tv_(std::move(tv)),
      min_voiced_seconds_(min_voiced_seconds) {
  frontend_.Validate();
  if (!ubm_.frontend_digest().empty() && ubm_.frontend_digest() != frontend_.Digest()) {
    Fail(ErrorCode::kDigestMismatch, "UBM was trained with a different front-end configuration");
  }
  if (ubm_.dim() != frontend_.FeatureDim()) {
    Fail(ErrorCode::kDimensionMismatch, "UBM dimension does not match the front-end feature size");
  }
  if (!tv_.ubm_digest.empty() && tv_.ubm_digest != ubm_.Digest()) {
    Fail(ErrorCode::kDigestMismatch, "total-variability model was trained against a different UBM");
  }
  if (tv_.t.rows() != static_cast<Eigen::Index>(ubm_.num_components()) * ubm_.dim()) {
    Fail(ErrorCode::kDimensionMismatch, "total-variability matrix does not match the UBM");
  }
}

IVector SpeakerModel::Extract(const audio::AudioBuffer &buf, std::string source_sample) const {
  const audio::MfccMatrix feats = audio::VoicedMfcc(buf, frontend_);
  const double voiced = static_cast<double>(feats.frames.rows()) * frontend_.frame_step;
  if (voiced + 1e-9 < min_voiced_seconds_) {
    Fail(ErrorCode::kAudioTooShort, "only " + std::to_string(voiced) + " s of voiced audio, need " +
                                        std::to_string(min_voiced_seconds_) + " s");
  }
  return IVector{ExtractIVector(AccumulateStats(feats.frames, ubm_), ubm_, tv_), std::move(source_sample)};
}

VerificationOutcome ScoreSpeaker(std::span<const IVector> enrolled, const IVector &probe, double threshold) {
  if (enrolled.empty()) Fail(ErrorCode::kNotEnrolled, "no enrollment i-vectors");
  VerificationOutcome out;
  out.instrument = Instrument::kVR;
  out.threshold = threshold;
  out.score = -1.0;
  for (const auto &e : enrolled) {
    const double s = CosineSimilarity(probe.w, e.w);
    out.item_scores.push_back(s);
    out.score = std::max(out.score, s);
  }
  out.accepted = out.score > threshold;
  return out;
}

registry::Registry::Trainer SpeakerTrainer(const registry::Registry &store, const SpeakerModel &model) {
  return [&store, &model](const std::vector<registry::BiometricSample> &samples) {
    std::vector<registry::TemplateDraft> drafts;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      try {
        const audio::AudioBuffer buf = audio::DecodeWav(store.LoadBlob(samples[i].payload_ref));
        drafts.push_back({samples[i].session_id, model.Extract(buf, samples[i].payload_ref)});
      } catch (const Error &e) {
        Fail(e.code(), "enrollment sample " + std::to_string(i) + " (" + samples[i].payload_ref + "): " + e.detail());
      }
    }
    return drafts;
  };
}

std::vector<registry::Template> EnrollSpeaker(registry::Registry &store, const std::string &identity,
                                              const SpeakerModel &model, std::span<const VoiceSample> samples) {
  if (store.IsEnrolled(identity, Modality::kVoice)) {
    Fail(ErrorCode::kAlreadyEnrolled, "'" + identity + "' is already enrolled for voice");
  }
  // Validate every sample before anything is stored.
  for (std::size_t i = 0; i < samples.size(); ++i) {
    try {
      audio::VoiceActivityMask(samples[i].audio, model.frontend());
    } catch (const Error &e) {
      Fail(e.code(), "enrollment sample " + std::to_string(i) + ": " + e.detail());
    }
  }
  for (const auto &s : samples) {
    const std::string blob = store.StoreBlob(audio::EncodeWav(s.audio));
    store.SubmitEnrollmentSample(identity, registry::BiometricSample{Modality::kVoice, blob, s.audio.duration(),
                                                                     s.captured_at, s.session_id});
  }
  return store.FinalizeEnrollment(identity, Modality::kVoice, SpeakerTrainer(store, model));
}

VerificationOutcome VerifySpeaker(const registry::Registry &store, const std::string &claimed,
                                  const SpeakerModel &model, const audio::AudioBuffer &probe, double threshold) {
  const auto templates = store.FetchTemplates(claimed, Modality::kVoice);
  if (templates.empty()) Fail(ErrorCode::kNotEnrolled, "'" + claimed + "' is not enrolled for voice");
  std::vector<IVector> enrolled;
  for (const auto &t : templates) enrolled.push_back(std::get<IVector>(t.body));
  return ScoreSpeaker(enrolled, model.Extract(probe), threshold);
}

}  // namespace trustauth::speaker
