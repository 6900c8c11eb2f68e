#pragma once

#include "vcsched/sched.hpp"

namespace vcsched {

enum class cti_sign_mode {
    as_printed,  // RSRank = Rank - CTI with CTI = best EFT - runner-up (<= 0)
    absolute,    // RSRank = Rank - |CTI|: scarce subtasks move to the front
};

struct rfid_config {
    double alpha_t = 1.0;    // weight on completion time
    double alpha_r = 1.0;    // weight on link reliability
    double phi_scale = 0.5;  // coefficient of the degree bonus
    cti_sign_mode cti_mode = cti_sign_mode::absolute;
    bool disable_cti = false;  // force CTI = 0 (phase-reduction checks)
};

// Mean computation time of ni over a candidate set.
double dyn_avg_ct(int ni, const std::vector<int>& cand, const schedule_state& state);

// Mean transmission time of the edge nj -> ni from nj's host to each candidate.
double dyn_avg_tt(int nj, int ni, const std::vector<int>& cand,
                  const schedule_state& state, double st);

// Best-minus-runner-up EFT over the candidate set; -inf when only one
// candidate exists (maximal scarcity).
double cti(int ni, const std::vector<int>& cand, const schedule_state& state);

double weighted_eft(double eft, int degree, const rfid_config& cfg);

// Three-phase dynamic scheduler: dynamic downward ranking, resource-scarcity
// priority changing, degree-weighted EFT vehicle selection.
class rfid_scheduler final : public scheduler {
public:
    explicit rfid_scheduler(rfid_config cfg = {}) : cfg_(cfg) {}
    std::string name() const override { return "rfid"; }
    std::optional<failure_record> run(schedule_state& state,
                                      std::mt19937_64& rng) override;

    const rfid_config& config() const { return cfg_; }

private:
    rfid_config cfg_;
};

}  // namespace vcsched
