// @vitest-environment jsdom
import { beforeEach, describe, expect, it, vi } from 'vitest'

import type { TurnOutcome } from '../src/api'
import { ChatPanel } from '../src/chat'
import { FeedbackDialog } from '../src/feedback'

function outcome(partial: Partial<TurnOutcome>): TurnOutcome {
  return {
    ok: true, messages: [], errors: [], pending_selection: null,
    created_rules: [], applied: [], reverted: [], intent: null,
    raw_output: null, failed_operation: null, failed_input: null,
    failed_action_index: null, advice: null, step_index: null,
    turn_index: 0, replaces_turn: null, instance_count: 0, rule_count: 0,
    ...partial,
  }
}

function handlers() {
  return {
    onSend: vi.fn(), onSelect: vi.fn(), onApply: vi.fn(),
    onRevert: vi.fn(), onFeedback: vi.fn(),
  }
}

describe('ChatPanel', () => {
  beforeEach(() => {
    document.body.innerHTML = '<div id="chat"></div>'
  })

  it('renders candidate buttons for a pending selection', () => {
    const h = handlers()
    const panel = new ChatPanel(document.getElementById('chat')!, h)
    panel.renderOutcome(outcome({
      pending_selection: {
        kind: 'ingredient', query: 'HDT',
        candidates: ['HDT_dithiol', 'HDT_monothiol'],
      },
      messages: ["2 ingredients match 'HDT'; pick one"],
    }))
    const buttons = panel.candidateButtons()
    expect(buttons).toHaveLength(2)
    expect(buttons.map((b) => b.textContent)).toEqual(['HDT_dithiol', 'HDT_monothiol'])
    buttons[1].click()
    expect(h.onSelect).toHaveBeenCalledWith(1)
    expect(panel.candidateButtons()).toHaveLength(0) // consumed after click
  })

  it('shows every server error as a visible message', () => {
    const panel = new ChatPanel(document.getElementById('chat')!, handlers())
    panel.renderOutcome(outcome({
      ok: false,
      errors: [{ message: 'no catalog ingredient matches', kind: 'UnknownIngredient' }],
    }))
    const errors = document.querySelectorAll('.bubble-error')
    expect(errors).toHaveLength(1)
    expect(errors[0].textContent).toContain('UnknownIngredient')
  })

  it('renders apply and revert buttons per rule', () => {
    const h = handlers()
    const panel = new ChatPanel(document.getElementById('chat')!, h)
    panel.renderRules([
      { id: 1, type: 'fill', description: 'gold layer', applications: 1 },
      { id: 2, type: 'connection', description: 'linkers', applications: 0 },
    ])
    const applies = document.querySelectorAll<HTMLButtonElement>('.apply-button')
    const reverts = document.querySelectorAll<HTMLButtonElement>('.revert-button')
    expect(applies).toHaveLength(2)
    expect(reverts).toHaveLength(2)
    expect(reverts[1].disabled).toBe(true) // never applied
    applies[0].click()
    expect(h.onApply).toHaveBeenCalledWith(1)
  })

  it('sending a message echoes the user bubble and calls the handler', () => {
    const h = handlers()
    const panel = new ChatPanel(document.getElementById('chat')!, h)
    panel.input.value = 'save the model'
    panel.input.form!.dispatchEvent(new Event('submit'))
    expect(h.onSend).toHaveBeenCalledWith('save the model')
    expect(document.querySelector('.bubble-user')!.textContent).toBe('save the model')
  })

  it('offers a correction button on failed turns', () => {
    const h = handlers()
    const panel = new ChatPanel(document.getElementById('chat')!, h)
    const failed = outcome({
      ok: false, failed_operation: 'rule_extraction', raw_output: 'unknown',
      errors: [{ message: 'matches no rule type', kind: 'UnrecognizedRuleType' }],
    })
    panel.renderOutcome(failed)
    const button = document.querySelector<HTMLButtonElement>('.feedback-button')!
    button.click()
    expect(h.onFeedback).toHaveBeenCalledWith(failed)
  })
})

describe('FeedbackDialog', () => {
  beforeEach(() => {
    document.body.innerHTML = '<div id="feedback"></div>'
  })

  it('shows a rule-type picker for extraction failures', () => {
    const onSubmit = vi.fn()
    const dialog = new FeedbackDialog(document.getElementById('feedback')!, onSubmit)
    dialog.open(outcome({
      ok: false, turn_index: 3, failed_operation: 'rule_extraction',
      raw_output: 'unknown',
    }))
    expect(dialog.isOpen()).toBe(true)
    const picker = document.querySelector<HTMLSelectElement>('.rule-type-picker')!
    expect(picker.options).toHaveLength(6)
    picker.value = 'siblings'
    document.querySelector<HTMLButtonElement>('.feedback-submit')!.click()
    expect(onSubmit).toHaveBeenCalledWith(3, 'siblings', 'rule_extraction')
    expect(dialog.isOpen()).toBe(false)
  })

  it('gates the JSON editor on live validation', () => {
    const onSubmit = vi.fn()
    const dialog = new FeedbackDialog(document.getElementById('feedback')!, onSubmit)
    dialog.open(outcome({
      ok: false, turn_index: 1, failed_operation: 'code_generation',
      raw_output: '{"saveModel": "yes"}',
    }))
    const editor = document.querySelector<HTMLTextAreaElement>('.json-editor')!
    const submit = document.querySelector<HTMLButtonElement>('.feedback-submit')!
    expect(submit.disabled).toBe(true) // raw output is invalid as-is
    editor.value = '{"saveModel": true}'
    editor.dispatchEvent(new Event('input'))
    expect(submit.disabled).toBe(false)
    submit.click()
    expect(onSubmit).toHaveBeenCalledWith(1, '{"saveModel": true}', 'code_generation')
  })

  it('shows the raw backend output', () => {
    const dialog = new FeedbackDialog(document.getElementById('feedback')!, vi.fn())
    dialog.open(outcome({
      ok: false, turn_index: 0, failed_operation: 'code_generation',
      raw_output: '{"bogus": 1}',
    }))
    expect(document.querySelector('.raw-output')!.textContent).toBe('{"bogus": 1}')
  })
})
