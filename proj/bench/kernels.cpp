// Serial reference loops against the OpenMP kernels on a rendered 1024x640 scene.

#include "mcc/imgproc.hpp"
#include "mcc/recognition.hpp"
#include "mcc/render.hpp"

#include <benchmark/benchmark.h>

using namespace mcc;

namespace {

const ColorCheckerModel& model()
{
    static const ColorCheckerModel m = ColorCheckerModel::synthetic();
    return m;
}

const ImageBuffer& scene()
{
    static const ImageBuffer img = [] {
        render::RenderConfig cfg;
        return render::render_batch(cfg, std::span(&model(), 1), 1, 99).front().image;
    }();
    return img;
}

const BinaryMask& mask()
{
    static const BinaryMask m = imgproc::adaptive_threshold(scene(), 15, 3.0);
    return m;
}

template <class F>
void run(benchmark::State& state, F f)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(f());
    state.SetItemsProcessed(state.iterations() * scene().width() * scene().height());
}

void BM_Resize(benchmark::State& s) { run(s, [] { return imgproc::resize_bilinear(scene(), 640, 400); }); }
void BM_ResizeSerial(benchmark::State& s) { run(s, [] { return imgproc::serial::resize_bilinear(scene(), 640, 400); }); }
void BM_Wiener(benchmark::State& s) { run(s, [] { return imgproc::wiener_filter(scene(), 5); }); }
void BM_WienerSerial(benchmark::State& s) { run(s, [] { return imgproc::serial::wiener_filter(scene(), 5); }); }
void BM_Threshold(benchmark::State& s) { run(s, [] { return imgproc::adaptive_threshold(scene(), 15, 3.0); }); }
void BM_ThresholdSerial(benchmark::State& s) { run(s, [] { return imgproc::serial::adaptive_threshold(scene(), 15, 3.0); }); }
void BM_Erode(benchmark::State& s) { run(s, [] { return imgproc::erode3x3(mask()); }); }
void BM_ErodeSerial(benchmark::State& s) { run(s, [] { return imgproc::serial::erode3x3(mask()); }); }
void BM_Dilate(benchmark::State& s) { run(s, [] { return imgproc::dilate3x3(mask()); }); }
void BM_DilateSerial(benchmark::State& s) { run(s, [] { return imgproc::serial::dilate3x3(mask()); }); }
void BM_Label(benchmark::State& s) { run(s, [] { return imgproc::label_components(mask()); }); }
void BM_LabelSerial(benchmark::State& s) { run(s, [] { return imgproc::serial::label_components(mask()); }); }
void BM_Detect(benchmark::State& s) { run(s, [] { return recognition::detect(scene(), model()); }); }

}  // namespace

BENCHMARK(BM_Resize)->UseRealTime();
BENCHMARK(BM_ResizeSerial)->UseRealTime();
BENCHMARK(BM_Wiener)->UseRealTime();
BENCHMARK(BM_WienerSerial)->UseRealTime();
BENCHMARK(BM_Threshold)->UseRealTime();
BENCHMARK(BM_ThresholdSerial)->UseRealTime();
BENCHMARK(BM_Erode)->UseRealTime();
BENCHMARK(BM_ErodeSerial)->UseRealTime();
BENCHMARK(BM_Dilate)->UseRealTime();
BENCHMARK(BM_DilateSerial)->UseRealTime();
BENCHMARK(BM_Label)->UseRealTime();
BENCHMARK(BM_LabelSerial)->UseRealTime();
BENCHMARK(BM_Detect)->UseRealTime()->Unit(benchmark::kMillisecond);

int main(int argc, char** argv)
{
    mask();  // render the scene outside the timed loops
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv))
        return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
