// End-to-end checks of the wearlab binary: artifact production, rerun
// determinism, subcommand composition, and exit codes.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "wearlab/csv.hpp"

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::cerr << "FAILED: " << what << "\n";
    }
}

int run_cmd(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) { return wearlab::read_text_file(p.string()); }

}  // namespace

int main() {
    const std::string cli = WEARLAB_CLI_PATH;
    const fs::path work = fs::temp_directory_path() / "wearlab_cli_test";
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string cohort = (work / "cohort").string();
    const std::string quiet = " >" + (work / "stdout.txt").string() + " 2>" +
                              (work / "stderr.txt").string();

    // synth writes a parseable cohort
    check(run_cmd(cli + " synth --out " + cohort +
                  " --positives 5 --negatives 4 --days 6 --seed 3 --amplify 2.5" + quiet) == 0,
          "synth exits 0");
    check(fs::exists(cohort + "/subjects.csv"), "manifest written");
    check(fs::exists(cohort + "/S001/cgm.csv"), "subject dir written");
    check(fs::exists(cohort + "/S009/ecg_sessions.csv"), "last subject written");

    // full pipeline from a config file
    const std::string config_path = (work / "demo.json").string();
    {
        std::ofstream cfg(config_path);
        cfg << "{\n"
            << "  \"cohort\": \"" << cohort << "\",\n"
            << "  \"out\": \"" << (work / "run_out").string() << "\",\n"
            << "  \"scenario\": \"combined\",\n"
            << "  \"selector\": \"none\",\n"
            << "  \"model\": \"knn\",\n"
            << "  \"seeds\": [0, 1],\n"
            << "  \"threads\": 2\n"
            << "}\n";
    }
    check(run_cmd(cli + " run --config " + config_path + quiet) == 0, "run exits 0");
    for (const char* artifact :
         {"features.csv", "registry.json", "corr.csv", "summary.json", "strong_pairs.csv",
          "selection.json", "eval.json", "roc.csv", "results_table.csv"}) {
        check(fs::exists(work / "run_out" / artifact), std::string("run wrote ") + artifact);
    }

    // rerun with the same config into a second directory: byte-identical eval.json
    check(run_cmd(cli + " run --config " + config_path + " --out " +
                  (work / "run_out2").string() + quiet) == 0,
          "rerun exits 0");
    check(slurp(work / "run_out" / "eval.json") == slurp(work / "run_out2" / "eval.json"),
          "rerun eval.json is byte-identical");
    check(slurp(work / "run_out" / "features.csv") == slurp(work / "run_out2" / "features.csv"),
          "rerun features.csv is byte-identical");

    // staged subcommands compose to the same artifacts as run
    const std::string staged = (work / "staged").string();
    check(run_cmd(cli + " extract --cohort " + cohort + " --out " + staged + quiet) == 0,
          "extract exits 0");
    check(run_cmd(cli + " stats --features " + staged + "/features.csv --cohort " + cohort +
                  " --out " + staged + quiet) == 0,
          "stats exits 0");
    check(run_cmd(cli + " select --features " + staged + "/features.csv --out " + staged +
                  " --selector none --model knn --seed 0" + quiet) == 0,
          "select exits 0");
    check(run_cmd(cli + " evaluate --features " + staged + "/features.csv --out " + staged +
                  " --scenario combined --selector none --model knn --seeds 0,1 --threads 2" +
                  quiet) == 0,
          "evaluate exits 0");
    for (const char* artifact :
         {"features.csv", "registry.json", "corr.csv", "summary.json", "strong_pairs.csv",
          "selection.json", "eval.json", "roc.csv", "results_table.csv"}) {
        check(slurp(work / "run_out" / artifact) == slurp(fs::path(staged) / artifact),
              std::string("staged == run for ") + artifact);
    }

    // threads must not change results
    check(run_cmd(cli + " evaluate --features " + staged + "/features.csv --out " +
                  (work / "t1").string() +
                  " --scenario combined --selector none --model knn --seeds 0,1 --threads 1" +
                  quiet) == 0,
          "evaluate t1 exits 0");
    check(slurp(work / "t1" / "eval.json") == slurp(work / "run_out" / "eval.json"),
          "eval.json identical at 1 and 2 threads");

    // unknown model kind: exit 2 and the message names the valid kinds
    {
        const int code = run_cmd(cli + " evaluate --features " + staged +
                                 "/features.csv --model nope" + quiet);
        check(code == 2, "unknown model exits 2");
        const std::string err = slurp(work / "stderr.txt");
        check(err.find("rf, gb, lr, svm, mlp, knn") != std::string::npos,
              "error lists valid model kinds");
    }
    // unknown selector and missing config behave the same way
    check(run_cmd(cli + " evaluate --features " + staged + "/features.csv --selector what" +
                  quiet) == 2,
          "unknown selector exits 2");
    check(run_cmd(cli + " run --config " + (work / "missing.json").string() + quiet) == 2,
          "missing config exits 2");

    if (failures == 0) {
        std::cout << "test_cli: all checks passed\n";
        fs::remove_all(work);
        return 0;
    }
    std::cerr << "test_cli: " << failures << " checks failed (workspace kept at " << work
              << ")\n";
    return 1;
}
