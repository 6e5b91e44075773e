#include "fairod/dcfod/model.hpp"

#include <algorithm>

#include "fairod/dcfod/assignment.hpp"
#include "fairod/errors.hpp"

namespace fairod::dcfod {

namespace {

numcore::MlpSpec chain(Index in, const std::vector<Index>& hidden, Index out, double dropout,
                       numcore::Activation act) {
  numcore::MlpSpec spec;
  spec.widths.push_back(in);
  spec.widths.insert(spec.widths.end(), hidden.begin(), hidden.end());
  spec.widths.push_back(out);
  spec.input_dropout = dropout;
  spec.hidden_activation = act;
  return spec;
}

// Stream ids for numcore::make_stream; one per randomly initialized block.
constexpr std::uint64_t kEncoderStream = 1;
constexpr std::uint64_t kDecoderStream = 2;
constexpr std::uint64_t kDiscriminatorStream = 3;

}  // namespace

template <typename Scalar>
BasicDcfodModel<Scalar> BasicDcfodModel<Scalar>::build(Index input_dims, int num_subgroups, const TrainConfig& config) {
  config.validate();
  if (input_dims < 1) throw ArgumentError("model: input dimension must be positive");
  if (config.uses_adversary() && num_subgroups < 1) {
    throw ArgumentError("model: discriminator needs at least one subgroup");
  }
  const Index d = config.embedding_dim;
  BasicDcfodModel model{
      Net(chain(input_dims, config.encoder_hidden, d, config.input_dropout, config.activation)),
      Net(chain(d, config.decoder_hidden, input_dims, 0.0, config.activation)),
      std::nullopt,
      Matrix::Zero(config.clusters, d),
  };
  if (config.uses_adversary()) {
    model.discriminator.emplace(chain(d, config.discriminator_hidden, num_subgroups, 0.0, config.activation));
  }
  return model;
}

template <typename Scalar>
void BasicDcfodModel<Scalar>::initialize(std::uint64_t seed) {
  auto enc = numcore::make_stream(seed, kEncoderStream);
  encoder.xavier_init(enc);
  auto dec = numcore::make_stream(seed, kDecoderStream);
  decoder.xavier_init(dec);
  if (discriminator) {
    auto disc = numcore::make_stream(seed, kDiscriminatorStream);
    discriminator->xavier_init(disc);
  }
}

template <typename Scalar>
Matrix BasicDcfodModel<Scalar>::embed(const Matrix& x, Index chunk) const {
  Matrix z(x.rows(), embedding_dim());
  for (Index start = 0; start < x.rows(); start += chunk) {
    const Index len = std::min(chunk, x.rows() - start);
    const numcore::MatrixX<Scalar> part = x.middleRows(start, len).template cast<Scalar>();
    z.middleRows(start, len) = encoder.predict(part).template cast<double>();
  }
  return z;
}

template <typename Scalar>
Vector BasicDcfodModel<Scalar>::score(const Matrix& x) const {
  return score_embeddings(embed(x), centroids);
}

template struct BasicDcfodModel<float>;
template struct BasicDcfodModel<double>;

Vector score_embeddings(const Matrix& z, const Matrix& centroids) {
  const Matrix sq = numcore::pairwise_sq_distances(z, centroids);
  return outlier_scores_from_sq(sq, nearest_memberships(sq));
}

}  // namespace fairod::dcfod
