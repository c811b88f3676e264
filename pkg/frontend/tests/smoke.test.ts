// @vitest-environment jsdom
//
// UI smoke against a live service (mock backend): the blood-plasma
// automatic run fills the viewport, an ambiguous HDT selection yields
// exactly two candidate buttons, and a forced rule-extraction failure
// round-trips through the feedback dialog into a re-run outcome.

import { spawn, type ChildProcess } from 'node:child_process'
import { mkdtempSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join, resolve } from 'node:path'
import { afterAll, beforeAll, describe, expect, it, vi } from 'vitest'
import WebSocket from 'ws'

import { ApiClient, type SceneDelta, type TurnOutcome } from '../src/api'
import { ChatPanel } from '../src/chat'
import { FeedbackDialog } from '../src/feedback'
import { SceneStore } from '../src/sceneStore'
import { Viewport } from '../src/viewport'

const PORT = 18000 + Math.floor(Math.random() * 2000)
const BASE = `http://127.0.0.1:${PORT}`
const PYTHON = process.env.MESOCHAT_PYTHON ?? '/usr/bin/python3'
let server: ChildProcess

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 120; i++) {
    try {
      const response = await fetch(`${BASE}/catalog`)
      if (response.ok) return
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 500))
  }
  throw new Error('service did not come up')
}

beforeAll(async () => {
  // vitest runs with cwd=frontend/; the service wants the repo root for the
  // catalog. Feedback submissions persist to the prompt store, so the test
  // server gets a throwaway prompts directory instead of the repo's.
  const promptsDir = mkdtempSync(join(tmpdir(), 'mesochat-prompts-'))
  server = spawn(
    PYTHON,
    ['-m', 'mesochat.service.app', '--port', String(PORT), '--prompts', promptsDir],
    { cwd: resolve(process.cwd(), '..'), stdio: 'ignore' },
  )
  await waitForServer()
})

afterAll(() => {
  server?.kill()
})

function handlers() {
  return {
    onSend: vi.fn(), onSelect: vi.fn(), onApply: vi.fn(),
    onRevert: vi.fn(), onFeedback: vi.fn(),
  }
}

describe('UI smoke against the live service', () => {
  it('renders the blood plasma automatic run in the viewport', async () => {
    const api = new ApiClient(BASE)
    await api.createSession(42)
    const result = await api.automatic('Generate a blood plasma model inside a box.')
    expect(result.ok).toBe(true)
    expect(result.steps).toHaveLength(8)

    const snapshot = await api.scene()
    expect(snapshot.instances.length).toBeGreaterThan(0)

    const store = new SceneStore()
    const viewport = new Viewport()
    store.replace(snapshot)
    viewport.update(store)
    expect(viewport.instanceCount()).toBe(snapshot.instances.length)
    expect(viewport.instanceCount()).toBeGreaterThanOrEqual(500)
  })

  it('shows exactly two candidate buttons for an HDT selection turn', async () => {
    document.body.innerHTML = '<div id="chat"></div>'
    const api = new ApiClient(BASE)
    await api.createSession(1)
    const panel = new ChatPanel(document.getElementById('chat')!, handlers())
    const outcome = await api.message(
      'Create the HDT layer 2 units above the rectangle skeleton')
    panel.renderOutcome(outcome)
    const buttons = panel.candidateButtons()
    expect(buttons).toHaveLength(2)
    expect(buttons.map((b) => b.textContent)).toEqual(['HDT_dithiol', 'HDT_monothiol'])
  })

  it('routes a forced extraction failure through the feedback dialog', async () => {
    document.body.innerHTML = '<div id="chat"></div><div id="feedback"></div>'
    const api = new ApiClient(BASE)
    await api.createSession(2)

    const rerunOutcomes: TurnOutcome[] = []
    const dialog = new FeedbackDialog(
      document.getElementById('feedback')!,
      (turn, corrected, operation) => {
        void api.feedback(turn, corrected, operation).then((rerun) => {
          rerunOutcomes.push(rerun)
          panel.renderOutcome(rerun)
        })
      },
    )
    const panel = new ChatPanel(document.getElementById('chat')!, {
      ...handlers(),
      onFeedback: (outcome) => dialog.open(outcome),
    })

    const failed = await api.message('Place lipid mysteriously around somewhere')
    expect(failed.ok).toBe(false)
    expect(failed.failed_operation).toBe('rule_extraction')
    panel.renderOutcome(failed)

    document.querySelector<HTMLButtonElement>('.feedback-button')!.click()
    expect(dialog.isOpen()).toBe(true)
    const picker = document.querySelector<HTMLSelectElement>('.rule-type-picker')!
    picker.value = 'siblings'
    document.querySelector<HTMLButtonElement>('.feedback-submit')!.click()

    await vi.waitFor(() => {
      expect(rerunOutcomes).toHaveLength(1)
    }, { timeout: 20_000 })
    const rerun = rerunOutcomes[0]
    expect(rerun.ok).toBe(true)
    expect(rerun.replaces_turn).toBe(failed.turn_index)
    // The re-run outcome is visible in the chat log.
    const bubbles = Array.from(document.querySelectorAll('.bubble-system'))
    expect(bubbles.some((b) => b.textContent!.includes('siblings'))).toBe(true)
  })

  it('reconciles viewport state from websocket deltas', async () => {
    const api = new ApiClient(BASE)
    await api.createSession(3)
    const store = new SceneStore()
    const viewport = new Viewport()
    store.replace(await api.scene())

    const deltas: SceneDelta[] = []
    const socket = new WebSocket(api.eventsUrl())
    socket.on('message', (data) => {
      const event = JSON.parse(String(data))
      if (event.type === 'scene-delta') deltas.push(event)
    })
    await new Promise((resolve) => socket.on('open', resolve))

    await api.message('Populate the Au atom uniformly on a rectangle skeleton')
    await api.message('set the number of elements to 25')
    await api.applyRule(1)

    await vi.waitFor(() => {
      expect(deltas.length).toBeGreaterThan(0)
    }, { timeout: 20_000 })

    let needsFetch = false
    for (const delta of deltas) {
      needsFetch = store.applyDelta(delta) || needsFetch
    }
    if (needsFetch) store.replace(await api.scene())
    viewport.update(store)

    const snapshot = await api.scene()
    expect(viewport.instanceCount()).toBe(snapshot.instances.length)
    expect(viewport.instanceCount()).toBe(25)
    socket.close()
  })
})
