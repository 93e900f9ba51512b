#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <stop_token>
#include <thread>

#include "dialogsynth/cli/app.hpp"

namespace {

volatile std::sig_atomic_t interrupted = 0;

extern "C" void on_sigint(int) { interrupted = 1; }

}  // namespace

int main(int argc, char** argv) {
  std::stop_source stop;
  std::signal(SIGINT, on_sigint);
  std::jthread watcher([&stop](std::stop_token done) {
    while (!done.stop_requested()) {
      if (interrupted) {
        std::cerr << "interrupt received, draining in-flight records\n";
        stop.request_stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  });
  return dialogsynth::cli::run(argc, argv, std::cout, std::cerr, stop.get_token());
}
