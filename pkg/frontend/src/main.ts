import { StepperUi } from "./controller.js"
import { StepperClient } from "./protocol.js"
import { DomSink } from "./render.js"
import { connectWebSocket } from "./wsTransport.js"

const DEFAULT_PROGRAM = `-- one int exchange
proc[]{ ~a(x:!int.end). x!<5>. 0 } store{}
| proc[]{ a(y:?int.end). y?(z). 0 } store{}
`

const boot = async () => {
  const status = document.getElementById("status")!
  const root = document.getElementById("app")!
  const input = document.getElementById("program") as HTMLTextAreaElement
  const loadBtn = document.getElementById("load") as HTMLButtonElement
  input.value = DEFAULT_PROGRAM

  const url = new URLSearchParams(location.search).get("bridge")
    ?? "ws://127.0.0.1:8765"
  let ui: StepperUi
  try {
    const transport = await connectWebSocket(url)
    const sink = new DomSink(root)
    ui = new StepperUi(new StepperClient(transport), sink)
    sink.wire(
      (key) => void ui.applyRedex(key).catch((e) => sink.showError(String(e))),
      (steps) => void ui.jumpTo(steps).catch((e) => sink.showError(String(e))),
    )
    status.textContent = `connected via ${url}`
  } catch (e) {
    status.textContent =
      `${e} — start the service (rsx serve) and the bridge (npm run bridge)`
    return
  }

  loadBtn.addEventListener("click", () => {
    void ui.load(input.value).catch((e) => {
      status.textContent = String(e)
    })
  })
}

void boot()
