#include "monotrace/loss.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace monotrace {

namespace {

void check_batch(const ScoredBatch& batch) {
    if (batch.benign.empty() || batch.malware.empty()) {
        throw std::invalid_argument("loss needs at least one score of each class");
    }
}

} // namespace

double auc_loss_naive(const ScoredBatch& batch, double margin) {
    check_batch(batch);
    long double total = 0.0L;
    for (double sb : batch.benign) {
        const double tb = sb + margin;
        for (double sm : batch.malware) {
            const double d = tb - sm;
            if (d > 0.0) total += static_cast<long double>(d) * d;
        }
    }
    const auto pairs = static_cast<long double>(batch.benign.size()) *
                       static_cast<long double>(batch.malware.size());
    return static_cast<double>(total / pairs);
}

LossResult auc_loss_naive_grad(const ScoredBatch& batch, double margin) {
    check_batch(batch);
    const std::size_t nb = batch.benign.size();
    const std::size_t nm = batch.malware.size();
    LossResult r;
    r.grad_benign.assign(nb, 0.0);
    r.grad_malware.assign(nm, 0.0);
    const long double pairs = static_cast<long double>(nb) * static_cast<long double>(nm);
    const long double coef = 2.0L / pairs;
    long double total = 0.0L;
    std::vector<long double> gm(nm, 0.0L);
    for (std::size_t b = 0; b < nb; ++b) {
        const double tb = batch.benign[b] + margin;
        long double gb = 0.0L;
        for (std::size_t m = 0; m < nm; ++m) {
            const double d = tb - batch.malware[m];
            if (d > 0.0) {
                total += static_cast<long double>(d) * d;
                gb += d;
                gm[m] -= d;
            }
        }
        r.grad_benign[b] = static_cast<double>(coef * gb);
    }
    for (std::size_t m = 0; m < nm; ++m) r.grad_malware[m] = static_cast<double>(coef * gm[m]);
    r.value = static_cast<double>(total / pairs);
    return r;
}

LossResult auc_loss_fast(const ScoredBatch& batch, double margin) {
    check_batch(batch);
    const std::size_t nb = batch.benign.size();
    const std::size_t nm = batch.malware.size();

    std::vector<double> sm_sorted(batch.malware);
    std::sort(sm_sorted.begin(), sm_sorted.end());
    // prefix1[i] = sum of the i smallest malware scores; prefix2 their squares.
    std::vector<long double> prefix1(nm + 1, 0.0L), prefix2(nm + 1, 0.0L);
    for (std::size_t i = 0; i < nm; ++i) {
        prefix1[i + 1] = prefix1[i] + sm_sorted[i];
        prefix2[i + 1] = prefix2[i] + static_cast<long double>(sm_sorted[i]) * sm_sorted[i];
    }

    LossResult r;
    r.grad_benign.assign(nb, 0.0);
    r.grad_malware.assign(nm, 0.0);
    const long double pairs = static_cast<long double>(nb) * static_cast<long double>(nm);
    const long double coef = 2.0L / pairs;

    // sum over active pairs of (t_b - s_m)^2 = c t_b^2 - 2 t_b S1 + S2.
    long double total = 0.0L;
    std::vector<double> tb_all(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const double tb = batch.benign[b] + margin;
        tb_all[b] = tb;
        const auto c = static_cast<std::size_t>(
            std::lower_bound(sm_sorted.begin(), sm_sorted.end(), tb) - sm_sorted.begin());
        if (c == 0) continue;
        const long double tbl = tb;
        total += static_cast<long double>(c) * tbl * tbl - 2.0L * tbl * prefix1[c] + prefix2[c];
        r.grad_benign[b] =
            static_cast<double>(coef * (static_cast<long double>(c) * tbl - prefix1[c]));
    }

    // Malware gradients need, per s_m, the count and sum of thresholds above
    // it: sort t_b and reuse the prefix-sum trick from the other side.
    std::vector<double> tb_sorted(tb_all);
    std::sort(tb_sorted.begin(), tb_sorted.end());
    std::vector<long double> tprefix(nb + 1, 0.0L);
    for (std::size_t i = 0; i < nb; ++i) tprefix[i + 1] = tprefix[i] + tb_sorted[i];
    for (std::size_t m = 0; m < nm; ++m) {
        const double sm = batch.malware[m];
        const auto lo = static_cast<std::size_t>(
            std::upper_bound(tb_sorted.begin(), tb_sorted.end(), sm) - tb_sorted.begin());
        const std::size_t c = nb - lo;
        if (c == 0) continue;
        const long double sum_t = tprefix[nb] - tprefix[lo];
        r.grad_malware[m] =
            static_cast<double>(-coef * (sum_t - static_cast<long double>(c) * sm));
    }

    r.value = static_cast<double>(total / pairs);
    return r;
}

double auc_roc(const std::vector<double>& scores, const std::vector<Label>& labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("auc_roc: scores and labels differ in length");
    }
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (Label l : labels) n_pos += (l == Label::malware) ? 1 : 0;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("auc_roc needs both classes present");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks over tie groups; AUC from the Mann-Whitney U statistic.
    long double rank_sum_pos = 0.0L;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const long double midrank = (static_cast<long double>(i + 1) + static_cast<long double>(j)) / 2.0L;
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == Label::malware) rank_sum_pos += midrank;
        }
        i = j;
    }
    const long double u = rank_sum_pos - static_cast<long double>(n_pos) *
                                             (static_cast<long double>(n_pos) + 1.0L) / 2.0L;
    return static_cast<double>(u / (static_cast<long double>(n_pos) *
                                    static_cast<long double>(n_neg)));
}

} // namespace monotrace
