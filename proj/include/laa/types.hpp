#pragma once

#include <cstdint>
#include <vector>

namespace laa {

/// Problem dimensions: K SBSs, L licensed subcarriers, W unlicensed
/// subcarriers, S users per SBS. Flat index helpers for the (k,l,s) and
/// (k,w,s) variable blocks used by allocations and the solver.
struct Dims {
  int K = 0;
  int L = 0;
  int W = 0;
  int S = 0;

  int nc() const { return K * L * S; }   // licensed (k,l,s) entries
  int nu() const { return K * W * S; }   // unlicensed (k,w,s) entries
  int n_users() const { return K * S; }

  int cidx(int k, int l, int s) const { return (k * L + l) * S + s; }
  int uidx(int k, int w, int s) const { return (k * W + w) * S + s; }
  int user(int k, int s) const { return k * S + s; }

  // gain from SBS j on licensed subcarrier l to user (k,s)
  int lic_gain_idx(int j, int l, int k, int s) const {
    return ((j * L + l) * K + k) * S + s;
  }
  int macro_gain_idx(int k, int l) const { return k * L + l; }
};

/// Per-slot realization of the random environment.
struct SlotState {
  std::int64_t t = 0;
  Dims dims;
  std::vector<double> gains_licensed;    // [lic_gain_idx(j,l,k,s)], linear
  std::vector<double> gains_macro;       // [macro_gain_idx(k,l)] SBS k -> macro user
  std::vector<double> gains_unlicensed;  // [uidx(k,w,s)]
  std::vector<double> arrivals;          // [user(k,s)] bits
  std::vector<int> wifi_count;           // [k]
};

/// Per-user backlog in bits, indexed by Dims::user(k,s).
using QueueVector = std::vector<double>;

/// Subcarrier assignments and transmit powers for both bands.
/// x entries are {0,1} after rounding, [0,1] inside the relaxed solver.
struct Allocation {
  std::vector<double> x_c;  // [cidx]
  std::vector<double> p_c;  // [cidx] watts
  std::vector<double> x_u;  // [uidx]
  std::vector<double> p_u;  // [uidx] watts

  static Allocation zeros(const Dims& d) {
    Allocation a;
    a.x_c.assign(d.nc(), 0.0);
    a.p_c.assign(d.nc(), 0.0);
    a.x_u.assign(d.nu(), 0.0);
    a.p_u.assign(d.nu(), 0.0);
    return a;
  }
};

}  // namespace laa
