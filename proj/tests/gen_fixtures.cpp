// Writes the bundled JSON fixtures from the in-code constructions.
#include <fstream>
#include <iostream>

#include "fixtures.hpp"
#include "mellglue/io.hpp"

using namespace mellglue;
namespace fx = mellglue::fixtures;

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "fixtures";
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir + "/" + name);
    out << text << "\n";
    std::cout << dir << "/" << name << "\n";
  };
  write("fig5.json", encode_net(fx::fig5_S()));
  write("pointed-quasi.json", encode_net(fx::pointed_quasi_R()));
  write("fig6-element.json", encode_net(fx::fig6_element()));
  write("fig7-emptying.json", encode_net(fx::fig7_emptying()));
  write("longex2-rho.json", encode_net(fx::longex2_rho()));
  write("longex2-R.json", encode_net(fx::longex2_R()));
  write("sigma0.json", encode_net(fx::fig8_sigma0()));
  write("S0.json", encode_net(fx::fig8_S0()));
  write("box-around-one.json", encode_net(fx::box_around_one()));
  write("church-pi.json", encode_net(fx::church_pi()));
  write("not-coherent-12.json",
        encode_net_set(make_net_set({fx::not_coherent_rho1(), fx::not_coherent_rho2()})));
  write("not-coherent-13.json",
        encode_net_set(make_net_set({fx::not_coherent_rho1(), fx::not_coherent_rho3()})));
  write("not-coherent-23.json",
        encode_net_set(make_net_set({fx::not_coherent_rho2(), fx::not_coherent_rho3()})));
  write("not-coherent-123.json",
        encode_net_set(make_net_set(
            {fx::not_coherent_rho1(), fx::not_coherent_rho2(), fx::not_coherent_rho3()})));
  write("sigma0-set.json", encode_net_set(make_net_set({fx::fig8_sigma0()})));
  write("longex2-rho-set.json", encode_net_set(make_net_set({fx::longex2_rho()})));
  return 0;
}
