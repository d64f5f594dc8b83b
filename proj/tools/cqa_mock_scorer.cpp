// Serves one of the built-in mock scorers over the scoring protocol. Prints
// the bound port on stdout and runs until SIGINT or SIGTERM.
#include <csignal>
#include <iostream>

#include "CLI11.hpp"

#include "cqa/mock_scorers.hpp"
#include "cqa/scorer_protocol.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Mock scorer server"};
    std::string host = "127.0.0.1", kind = "mock:term-overlap";
    int port = 0;
    app.add_option("--host", host)->capture_default_str();
    app.add_option("--port", port, "0 picks a free port")->capture_default_str();
    app.add_option("--scorer", kind)->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    try {
        auto scorer = cqa::make_mock_scorer(kind);
        cqa::ScoringServer server(*scorer);
        std::cout << server.start(host, port) << std::endl;
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
