// Bridge adapter that answers every observation with one fixed action.
// Usage: bridge_echo_policy [pick_x pick_y pick_rot place_x place_y place_rot]

#include <cstdlib>
#include <iostream>

#include "ert/victim/bridge.hpp"

namespace {

class EchoVictim : public ert::victim::Victim {
 public:
  explicit EchoVictim(ert::sim::StepAction a) : action_(a) {}
  void reset(const ert::sim::TaskSpec&, const std::string&) override {}
  std::optional<ert::sim::StepAction> act(const ert::victim::Observation&) override { return action_; }
  std::string name() const override { return "echo"; }

 private:
  ert::sim::StepAction action_;
};

}  // namespace

int main(int argc, char** argv) {
  double v[6] = {0.5, 0.5, 0.0, 0.25, 0.75, 0.0};
  if (argc == 7)
    for (int i = 0; i < 6; ++i) v[i] = std::atof(argv[i + 1]);
  EchoVictim victim(ert::sim::StepAction::make({v[0], v[1]}, v[2], {v[3], v[4]}, v[5]));
  ert::victim::bridge_serve(std::cin, std::cout, victim);
  return 0;
}
