// Node-side transport: raw TCP to the service's loopback socket.
// Used by the scripted session tests and any terminal tooling.

import * as net from "node:net"

import { LineTransport, createLineSplitter } from "./protocol.js"

export const connectTcp = (port: number, host = "127.0.0.1"): Promise<LineTransport> =>
  new Promise((resolve, reject) => {
    const sock = net.createConnection({ port, host })
    const lineHandlers: Array<(line: string) => void> = []
    const closeHandlers: Array<() => void> = []
    const splitter = createLineSplitter((line) => {
      for (const h of lineHandlers) h(line)
    })
    sock.setEncoding("utf8")
    sock.on("data", (chunk: string) => splitter.push(chunk))
    sock.on("close", () => {
      for (const h of closeHandlers) h()
    })
    sock.once("error", reject)
    sock.once("connect", () =>
      resolve({
        send: (line) => void sock.write(line),
        onLine: (cb) => void lineHandlers.push(cb),
        onClose: (cb) => void closeHandlers.push(cb),
        close: () => sock.end(),
      }),
    )
  })
